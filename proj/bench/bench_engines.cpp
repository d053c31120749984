#include <benchmark/benchmark.h>

#include "modcs/experiments.hpp"
#include "modcs/probability.hpp"
#include "modcs/snc.hpp"

using namespace modcs;
namespace prob = modcs::probability;

namespace {

const DenseMatrix& small_matrix() {
  static const DenseMatrix a = experiments::seeded_matrix(7, 9, 42);
  return a;
}

const prob::Scenario kSmall{9, 4, 2, 1};

snc::SncInstance wide_instance() {
  const DenseMatrix a = experiments::seeded_matrix(20, 40, 3);
  const IndexSet delta(40, {1, 4, 7, 11, 15, 19, 23, 28});
  return {a, IndexSet(40, {0, 2}), delta,
          SignPattern(delta, {1, -1, 1, 1, -1, 1, -1, 1})};
}

void BM_ExactParallel(benchmark::State& st) {
  for (auto _ : st) benchmark::DoNotOptimize(prob::exact_probability(small_matrix(), kSmall));
}

void BM_ExactSerial(benchmark::State& st) {
  for (auto _ : st) {
    benchmark::DoNotOptimize(prob::exact_probability_serial(small_matrix(), kSmall));
  }
}

void BM_McParallel(benchmark::State& st) {
  const auto m = static_cast<std::uint64_t>(st.range(0));
  for (auto _ : st) benchmark::DoNotOptimize(prob::mc_outcomes(small_matrix(), kSmall, m, 1));
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_McSerial(benchmark::State& st) {
  const auto m = static_cast<std::uint64_t>(st.range(0));
  for (auto _ : st) {
    benchmark::DoNotOptimize(prob::mc_outcomes_serial(small_matrix(), kSmall, m, 1));
  }
  st.SetItemsProcessed(st.iterations() * st.range(0));
}

void BM_SncParallel(benchmark::State& st) {
  const auto inst = wide_instance();
  for (auto _ : st) benchmark::DoNotOptimize(snc::check_snc(inst));
}

void BM_SncSerial(benchmark::State& st) {
  const auto inst = wide_instance();
  for (auto _ : st) benchmark::DoNotOptimize(snc::check_snc_serial(inst));
}

}  // namespace

BENCHMARK(BM_ExactParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ExactSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_McParallel)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_McSerial)->Arg(1000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SncParallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SncSerial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
