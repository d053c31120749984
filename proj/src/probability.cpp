#include "modcs/probability.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>

#include "modcs/errors.hpp"

namespace modcs::probability {

namespace {

// Quads per unit of parallel work in the exact engine.
constexpr std::uint64_t kExactChunk = 64;

// Only called on quantities bounded by the enumeration cap.
std::uint64_t binomial_u64(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  std::uint64_t r = 1;
  for (std::size_t i = 1; i <= k; ++i) r = r * (n - k + i) / i;
  return r;
}

std::vector<std::size_t> first_combination(std::size_t k) {
  std::vector<std::size_t> c(k);
  for (std::size_t i = 0; i < k; ++i) c[i] = i;
  return c;
}

// Lexicographic successor of a k-subset of [0, n); wraps to the first
// combination and returns false after the last one.
bool advance_combination(std::vector<std::size_t>& c, std::size_t n) {
  const std::size_t k = c.size();
  std::size_t i = k;
  while (i > 0 && c[i - 1] == n - k + i - 1) --i;
  if (i == 0) {
    c = first_combination(k);
    return false;
  }
  ++c[i - 1];
  for (std::size_t j = i; j < k; ++j) c[j] = c[j - 1] + 1;
  return true;
}

std::vector<std::size_t> unrank_combination(std::size_t n, std::size_t k,
                                            std::uint64_t rank) {
  std::vector<std::size_t> c(k);
  std::size_t next = 0;
  for (std::size_t i = 0; i < k; ++i) {
    for (;; ++next) {
      const std::uint64_t block = binomial_u64(n - 1 - next, k - 1 - i);
      if (rank < block) break;
      rank -= block;
    }
    c[i] = next++;
  }
  return c;
}

std::vector<std::size_t> pick(const std::vector<std::size_t>& from,
                              const std::vector<std::size_t>& positions) {
  std::vector<std::size_t> out(positions.size());
  for (std::size_t i = 0; i < positions.size(); ++i) out[i] = from[positions[i]];
  return out;
}

void require_matching(const DenseMatrix& a, const Scenario& s) {
  s.validate();
  if (a.cols() != s.n) {
    throw DimensionMismatch("matrix has " + std::to_string(a.cols()) +
                            " columns but scenario n = " + std::to_string(s.n));
  }
}

ProbabilityEstimate exact_estimate(std::uint64_t count, std::uint64_t total,
                                   CheckerKind checker) {
  ProbabilityEstimate est;
  est.method = Method::Exact;
  est.recoverable_count = count;
  est.total_count = total;
  est.value = static_cast<double>(count) / static_cast<double>(total);
  est.checker = checker;
  return est;
}

}  // namespace

void Scenario::validate() const {
  auto fail = [](const std::string& what) {
    throw InvalidArgument("invalid scenario: " + what);
  };
  if (n < 1) fail("n >= 1 violated");
  if (ell < 1) fail("ell >= 1 violated");
  if (ell > n) fail("ell <= n violated");
  if (p1 > p) fail("p1 <= p violated");
  if (p - p1 > ell) fail("p2 = p - p1 <= ell violated");
  if (p1 > n - ell) fail("p1 <= n - ell violated");
}

snc::SncInstance Quad::instance(const DenseMatrix& a) const {
  return {a, known(), delta(), pattern};
}

const char* to_string(CheckerKind k) noexcept {
  switch (k) {
    case CheckerKind::Auto:
      return "auto";
    case CheckerKind::SncCertificate:
      return "snc";
    case CheckerKind::DirectSolve:
      return "solve";
  }
  return "?";
}

const char* to_string(Method m) noexcept {
  return m == Method::Exact ? "exact" : "mc";
}

CheckerKind parse_checker(const std::string& name) {
  if (name == "auto") return CheckerKind::Auto;
  if (name == "snc") return CheckerKind::SncCertificate;
  if (name == "solve") return CheckerKind::DirectSolve;
  throw InvalidArgument("unknown checker '" + name +
                        "' (expected auto, snc or solve)");
}

CheckerKind resolve(CheckerKind k, const Scenario& s) {
  if (k != CheckerKind::Auto) return k;
  const std::size_t d = s.unknown();
  const bool small = d < 63 && (std::uint64_t{1} << d) <= kAutoCertificateLimit;
  return small ? CheckerKind::SncCertificate : CheckerKind::DirectSolve;
}

BigInt binomial(std::size_t n, std::size_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  BigInt r = 1;
  for (std::size_t i = 1; i <= k; ++i) {
    r *= n - k + i;
    r /= i;
  }
  return r;
}

BigInt quad_space_size(const Scenario& s) {
  s.validate();
  BigInt signs = 1;
  signs <<= static_cast<unsigned>(s.unknown());
  return binomial(s.n, s.ell) * binomial(s.ell, s.p2()) *
         binomial(s.n - s.ell, s.p1) * signs;
}

QuadStream::QuadStream(const Scenario& s, std::uint64_t cap) : s_(s) {
  const BigInt total = quad_space_size(s);
  if (total > cap) {
    throw SpaceTooLarge("quad space has " + total.str() +
                        " elements, above the enumeration cap of " +
                        std::to_string(cap));
  }
  size_ = total.convert_to<std::uint64_t>();
  pattern_count_ = std::uint64_t{1} << s.unknown();
  seek(0);
}

void QuadStream::seek(std::uint64_t rank) {
  if (rank > size_) throw InvalidArgument("seek past end of quad stream");
  position_ = rank;
  if (rank == size_) return;
  const std::uint64_t h_count = binomial_u64(s_.n - s_.ell, s_.p1);
  const std::uint64_t s_count = binomial_u64(s_.ell, s_.p2());
  pattern_ = rank % pattern_count_;
  rank /= pattern_count_;
  h_combo_ = unrank_combination(s_.n - s_.ell, s_.p1, rank % h_count);
  rank /= h_count;
  s_combo_ = unrank_combination(s_.ell, s_.p2(), rank % s_count);
  rank /= s_count;
  n_combo_ = unrank_combination(s_.n, s_.ell, rank);
}

bool QuadStream::next(Quad& out) {
  if (position_ >= size_) return false;

  IndexSet support(s_.n, n_combo_);
  const IndexSet outside = support.complement();
  out.known_true = IndexSet(s_.n, pick(support.members(), s_combo_));
  out.errors = IndexSet(s_.n, pick(outside.members(), h_combo_));
  IndexSet delta = support.set_difference(out.known_true);
  std::vector<int> signs(delta.size());
  for (std::size_t j = 0; j < signs.size(); ++j) {
    signs[j] = ((pattern_ >> j) & 1U) ? -1 : 1;
  }
  out.pattern = SignPattern(std::move(delta), std::move(signs));
  out.support = std::move(support);

  ++position_;
  if (++pattern_ == pattern_count_) {
    pattern_ = 0;
    if (!advance_combination(h_combo_, s_.n - s_.ell) &&
        !advance_combination(s_combo_, s_.ell)) {
      advance_combination(n_combo_, s_.n);
    }
  }
  return true;
}

std::vector<Quad> enumerate_quads(const Scenario& s, std::uint64_t cap) {
  QuadStream stream(s, cap);
  std::vector<Quad> out;
  out.reserve(stream.size());
  Quad q;
  while (stream.next(q)) out.push_back(q);
  return out;
}

Quad sample_quad(const Scenario& s, SeededStream& rng) {
  s.validate();
  // Partial Fisher-Yates: the first k slots end up a uniform k-subset.
  auto choose = [&rng](std::vector<std::size_t> pool, std::size_t k) {
    for (std::size_t i = 0; i < k; ++i) {
      const std::size_t j = i + rng.below(pool.size() - i);
      std::swap(pool[i], pool[j]);
    }
    pool.resize(k);
    return pool;
  };

  Quad q;
  q.support = IndexSet(s.n, choose(IndexSet::full(s.n).members(), s.ell));
  q.known_true = IndexSet(s.n, choose(q.support.members(), s.p2()));
  q.errors = IndexSet(s.n, choose(q.support.complement().members(), s.p1));
  IndexSet delta = q.support.set_difference(q.known_true);
  std::vector<int> signs(delta.size());
  for (int& sg : signs) sg = rng.sign();
  q.pattern = SignPattern(std::move(delta), std::move(signs));
  return q;
}

SeededStream draw_stream(std::uint64_t seed, std::uint64_t index) noexcept {
  return SeededStream(seed).substream(stream_tag::kQuadSampling).substream(index);
}

bool quad_recoverable(const DenseMatrix& a, const Quad& q, CheckerKind checker,
                      double margin_tol) {
  const snc::SncInstance inst = q.instance(a);
  switch (checker) {
    case CheckerKind::SncCertificate:
      return snc::certificate_holds(inst, margin_tol);
    case CheckerKind::DirectSolve: {
      const RealVector ones(q.support.size(), 1.0);
      return snc::check_by_solving(inst, q.known_true, ones);
    }
    case CheckerKind::Auto:
      break;
  }
  throw InvalidArgument("checker must be resolved before use");
}

ProbabilityEstimate exact_probability_serial(const DenseMatrix& a,
                                             const Scenario& s,
                                             CheckerKind checker,
                                             double margin_tol,
                                             std::uint64_t cap) {
  require_matching(a, s);
  const CheckerKind kind = resolve(checker, s);
  QuadStream stream(s, cap);
  std::uint64_t count = 0;
  Quad q;
  while (stream.next(q)) {
    if (quad_recoverable(a, q, kind, margin_tol)) ++count;
  }
  return exact_estimate(count, stream.size(), kind);
}

ProbabilityEstimate exact_probability(const DenseMatrix& a, const Scenario& s,
                                      CheckerKind checker, double margin_tol,
                                      std::uint64_t cap) {
  require_matching(a, s);
  const CheckerKind kind = resolve(checker, s);
  const std::uint64_t total = QuadStream(s, cap).size();
  const auto chunks =
      static_cast<std::int64_t>((total + kExactChunk - 1) / kExactChunk);
  std::uint64_t count = 0;
  std::exception_ptr failure;

#pragma omp parallel for schedule(dynamic, 1) reduction(+ : count)
  for (std::int64_t c = 0; c < chunks; ++c) {
    try {
      QuadStream local(s, cap);
      const auto begin = static_cast<std::uint64_t>(c) * kExactChunk;
      const std::uint64_t end = std::min(total, begin + kExactChunk);
      local.seek(begin);
      Quad q;
      while (local.position() < end && local.next(q)) {
        if (quad_recoverable(a, q, kind, margin_tol)) ++count;
      }
    } catch (...) {
#pragma omp critical(modcs_exact_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  return exact_estimate(count, total, kind);
}

std::vector<std::uint8_t> mc_outcomes_serial(const DenseMatrix& a,
                                             const Scenario& s,
                                             std::uint64_t samples,
                                             std::uint64_t seed,
                                             CheckerKind checker,
                                             double margin_tol) {
  require_matching(a, s);
  const CheckerKind kind = resolve(checker, s);
  std::vector<std::uint8_t> out(samples, 0);
  for (std::uint64_t i = 0; i < samples; ++i) {
    SeededStream rng = draw_stream(seed, i);
    out[i] = quad_recoverable(a, sample_quad(s, rng), kind, margin_tol) ? 1 : 0;
  }
  return out;
}

std::vector<std::uint8_t> mc_outcomes(const DenseMatrix& a, const Scenario& s,
                                      std::uint64_t samples, std::uint64_t seed,
                                      CheckerKind checker, double margin_tol,
                                      Deadline deadline) {
  require_matching(a, s);
  const CheckerKind kind = resolve(checker, s);
  std::vector<std::uint8_t> out(samples, 0);
  std::atomic<bool> expired{false};
  std::exception_ptr failure;
  const auto n = static_cast<std::int64_t>(samples);

#pragma omp parallel for schedule(dynamic, 4)
  for (std::int64_t i = 0; i < n; ++i) {
    if (expired.load(std::memory_order_relaxed)) continue;
    if (deadline && std::chrono::steady_clock::now() > *deadline) {
      expired.store(true, std::memory_order_relaxed);
      continue;
    }
    try {
      SeededStream rng = draw_stream(seed, static_cast<std::uint64_t>(i));
      out[static_cast<std::size_t>(i)] =
          quad_recoverable(a, sample_quad(s, rng), kind, margin_tol) ? 1 : 0;
    } catch (...) {
#pragma omp critical(modcs_mc_failure)
      if (!failure) failure = std::current_exception();
    }
  }
  if (failure) std::rethrow_exception(failure);
  if (expired) throw BudgetExceeded("Monte Carlo run exceeded its wall-clock budget");
  return out;
}

double hoeffding_halfwidth(std::uint64_t samples, double alpha) {
  if (samples == 0) throw InvalidArgument("sample count must be positive");
  if (!(alpha > 0 && alpha < 1)) throw InvalidArgument("alpha must be in (0, 1)");
  return std::sqrt(std::log(2.0 / alpha) / (2.0 * static_cast<double>(samples)));
}

ProbabilityEstimate summarize_outcomes(std::span<const std::uint8_t> outcomes,
                                       std::uint64_t samples, std::uint64_t seed,
                                       CheckerKind resolved_checker,
                                       double alpha) {
  if (samples == 0 || samples > outcomes.size()) {
    throw InvalidArgument("sample count must be in [1, outcomes]");
  }
  std::uint64_t k = 0;
  for (std::uint64_t i = 0; i < samples; ++i) k += outcomes[i];
  ProbabilityEstimate est;
  est.method = Method::MonteCarlo;
  est.recoverable_count = k;
  est.total_count = samples;
  est.value = static_cast<double>(k) / static_cast<double>(samples);
  est.hoeffding_halfwidth = hoeffding_halfwidth(samples, alpha);
  est.seed = seed;
  est.checker = resolved_checker;
  return est;
}

ProbabilityEstimate mc_probability(const DenseMatrix& a, const Scenario& s,
                                   std::uint64_t samples, std::uint64_t seed,
                                   CheckerKind checker, double margin_tol,
                                   double alpha) {
  if (samples == 0) throw InvalidArgument("sample count must be positive");
  const std::vector<std::uint8_t> out =
      mc_outcomes(a, s, samples, seed, checker, margin_tol);
  return summarize_outcomes(out, samples, seed, resolve(checker, s), alpha);
}

}  // namespace modcs::probability
