#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "doctest.h"
#include "modcs/errors.hpp"
#include "modcs/experiments.hpp"

using namespace modcs;
using namespace modcs::experiments;
namespace fs = std::filesystem;

namespace {

const DenseMatrix kBpTrap{{1, 0, 0.3}, {0, 1, 0.3}};

fs::path scratch_dir(const char* name) {
  fs::path p = fs::temp_directory_path() / ("modcs_test_exp_" + std::string(name));
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::vector<std::string> lines(const std::string& text) {
  std::vector<std::string> out;
  std::istringstream in(text);
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

ExperimentConfig small_fig1(std::uint64_t seed) {
  ExperimentConfig cfg = example1_config(seed);
  cfg.cases[0].scenarios = {{9, 3, 2, 0}, {9, 3, 2, 1}, {9, 4, 2, 2}};
  cfg.empirical_trials = 200;
  return cfg;
}

}  // namespace

TEST_CASE("gen_uniform_matrix") {
  SeededStream a(1), b(1);
  const DenseMatrix one = gen_uniform_matrix(1, 1, 0, 1, a);
  CHECK(one(0, 0) >= 0.0);
  CHECK(one(0, 0) < 1.0);
  const DenseMatrix next = gen_uniform_matrix(7, 9, -0.5, 0.5, a);
  SeededStream c(1);
  CHECK(gen_uniform_matrix(1, 1, 0, 1, c) == one);
  b.next_u64();
  CHECK(next == gen_uniform_matrix(7, 9, -0.5, 0.5, b));
  CHECK(seeded_matrix(7, 9, 42) == seeded_matrix(7, 9, 42));
  CHECK_FALSE(seeded_matrix(7, 9, 42) == seeded_matrix(7, 9, 43));

  double sum = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const DenseMatrix m = seeded_matrix(7, 9, seed);
    for (double v : m.data()) {
      CHECK(v >= -0.5);
      CHECK(v < 0.5);
      sum += v;
    }
  }
  CHECK(std::abs(sum / 6300.0) <= 0.01);
  CHECK_THROWS_AS(gen_uniform_matrix(0, 3, 0, 1, a), InvalidArgument);
  CHECK_THROWS_AS(gen_uniform_matrix(2, 3, 1, 1, a), InvalidArgument);
}

TEST_CASE("empirical_recovery_rate examples") {
  const SeededStream rng(77);
  const DenseMatrix square{{0.9, 0.2, -0.1}, {0.1, -0.8, 0.3}, {0.2, 0.1, 0.7}};
  CHECK(empirical_recovery_rate(square, {3, 2, 1, 0}, 200, rng) == 1.0);
  CHECK(empirical_recovery_rate(square, {3, 1, 0, 0}, 200, rng) == 1.0);

  const double trap = empirical_recovery_rate(kBpTrap, {3, 1, 0, 0}, 5000, rng);
  CHECK(std::abs(trap - 2.0 / 3.0) <= 0.02);

  for (std::uint64_t i = 0; i < 20; ++i) {
    const double v = empirical_recovery_rate(kBpTrap, {3, 1, 0, 0}, 1, rng.substream(i));
    CHECK((v == 0.0 || v == 1.0));
  }
  CHECK(empirical_recovery_rate(kBpTrap, {3, 1, 0, 0}, 300, rng) ==
        empirical_recovery_rate(kBpTrap, {3, 1, 0, 0}, 300, rng));
  CHECK_THROWS_AS(empirical_recovery_rate(kBpTrap, {3, 1, 0, 0}, 0, rng), InvalidArgument);
  CHECK_THROWS_AS(empirical_recovery_rate(kBpTrap, {4, 1, 0, 0}, 10, rng),
                  DimensionMismatch);
}

TEST_CASE("stream tags are disjoint") {
  const SeededStream master(42);
  const auto m = master.substream(stream_tag::kMatrix).key();
  const auto q = master.substream(stream_tag::kQuadSampling).key();
  const auto e = master.substream(stream_tag::kEmpirical).key();
  CHECK(m != q);
  CHECK(q != e);
  CHECK(m != e);
}

TEST_CASE("configs") {
  const auto fig1 = example1_config(3);
  REQUIRE(fig1.cases.size() == 1);
  CHECK(fig1.cases[0].scenarios.size() == 18);
  CHECK(fig1.empirical_trials == 1000);

  const auto reduced = example2_config(3, Scale::Reduced);
  REQUIRE(reduced.cases.size() == 3);
  CHECK(reduced.mc_sample_grid == std::vector<std::uint64_t>{100, 500, 1000});
  CHECK(reduced.cases[2].sample_grid == std::vector<std::uint64_t>{100});
  CHECK(reduced.cases[1].checker == CheckerKind::DirectSolve);
  const auto full = example2_config(3, Scale::Full);
  CHECK(full.mc_sample_grid == std::vector<std::uint64_t>{100, 500, 1000, 5000, 10000});
  CHECK(full.cases[2].sample_grid.empty());

  ExperimentConfig bad = fig1;
  bad.empirical_trials = 0;
  CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  bad = fig1;
  bad.cases[0].scenarios.push_back({8, 2, 2, 0});
  CHECK_THROWS_AS(bad.validate(), DimensionMismatch);
  CHECK(parse_scale("full") == Scale::Full);
  CHECK_THROWS_AS(parse_scale("huge"), InvalidArgument);
}

TEST_CASE("run_example1 writes consistent outputs") {
  const fs::path dir = scratch_dir("fig1");
  const ExperimentConfig cfg = small_fig1(9);
  const ExperimentResult res = run_example1(cfg, dir);
  REQUIRE(res.points.size() == 3);

  const auto rows = lines(slurp(dir / "fig1.csv"));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] == "ell,p,p1,theoretical,empirical,trials,seed");

  const DenseMatrix a = seeded_matrix(7, 9, 9);
  for (std::size_t i = 0; i < res.points.size(); ++i) {
    const CurvePoint& p = res.points[i];
    REQUIRE(p.theoretical);
    REQUIRE(p.empirical);
    // No caching: an independent call gives the same number.
    CHECK(*p.theoretical == probability::exact_probability(a, p.scenario).value);
    const SeededStream emp = SeededStream(9).substream(stream_tag::kEmpirical).substream(i);
    CHECK(*p.empirical == empirical_recovery_rate(a, p.scenario, 200, emp));
    CHECK(rows[i + 1].rfind(std::to_string(p.scenario.ell) + ",2," +
                                std::to_string(p.scenario.p1) + ",",
                            0) == 0);
  }

  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(summary["experiment"] == "fig1");
  CHECK(summary["config"]["seed"] == 9);
  CHECK(summary["points"].size() == 3);
  CHECK(summary["all_passed"] == res.all_passed());
  CHECK(summary["checks"].size() == res.checks.size());
  CHECK(summary["points"][0]["seconds"].is_number());

  const fs::path again = scratch_dir("fig1_again");
  run_example1(cfg, again);
  CHECK(slurp(again / "fig1.csv") == slurp(dir / "fig1.csv"));
  fs::remove_all(dir);
  fs::remove_all(again);
}

TEST_CASE("run_example2 reuses one Monte Carlo run per case") {
  const fs::path dir = scratch_dir("fig2");
  ExperimentConfig cfg;
  cfg.seed = 5;
  cfg.mc_sample_grid = {50, 120};
  cfg.cases = {{6, 9, {{9, 3, 1, 0}}, CheckerKind::Auto, {}},
               {8, 20, {{20, 4, 2, 1}}, CheckerKind::DirectSolve, {30}}};
  const ExperimentResult res = run_example2(cfg, dir);
  REQUIRE(res.points.size() == 3);
  CHECK(res.all_passed());

  const DenseMatrix a0 = seeded_matrix(6, 9, 5);
  for (std::size_t i = 0; i < 2; ++i) {
    const auto est = probability::mc_probability(a0, {9, 3, 1, 0}, cfg.mc_sample_grid[i], 5);
    CHECK(*res.points[i].mc_value == est.value);
    CHECK(*res.points[i].hoeffding_halfwidth == *est.hoeffding_halfwidth);
    CHECK(res.points[i].checker == CheckerKind::SncCertificate);
  }
  const DenseMatrix a1 = seeded_matrix(8, 20, 6);
  CHECK(*res.points[2].mc_value ==
        probability::mc_probability(a1, {20, 4, 2, 1}, 30, 6, CheckerKind::DirectSolve).value);
  CHECK(res.points[2].seed == 6);

  const auto rows = lines(slurp(dir / "fig2.csv"));
  REQUIRE(rows.size() == 4);
  CHECK(rows[0] ==
        "case_m,case_n,ell,p,p1,M,estimate,hoeffding_halfwidth,seed,checker,status");
  CHECK(rows[3].rfind("8,20,4,2,1,30,", 0) == 0);
  CHECK(rows[3].find(",6,solve,ok") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("an exhausted budget is recorded, not fatal") {
  const fs::path dir = scratch_dir("budget");
  ExperimentConfig cfg;
  cfg.seed = 1;
  cfg.mc_sample_grid = {100000};
  cfg.cases = {{7, 9, {{9, 4, 2, 1}}, CheckerKind::Auto, {}}};
  cfg.case_budget = std::chrono::duration<double>(1e-6);
  const ExperimentResult res = run_example2(cfg, dir);
  REQUIRE(res.points.size() == 1);
  CHECK(res.points[0].status == "budget_exceeded");
  CHECK_FALSE(res.points[0].mc_value.has_value());
  CHECK_FALSE(res.all_passed());
  const auto rows = lines(slurp(dir / "fig2.csv"));
  REQUIRE(rows.size() == 2);
  CHECK(rows[1] == "7,9,4,2,1,100000,,,1,snc,budget_exceeded");
  fs::remove_all(dir);
}
