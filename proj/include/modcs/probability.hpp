#pragma once

// Recovery probability of a fixed matrix A over the quad space Z.
//
// A quad (N, S, H, t) fixes the support N (|N| = ell), the correctly known
// part S of N (|S| = p2 = p - p1), the wrong guesses H outside N (|H| = p1)
// and the signs t on delta = N \ S. The known support is T = S + H. Every
// quad is equally likely, so the probability is (#recoverable quads) / |Z|.
//
// exact_probability walks all of Z; mc_probability checks M uniform draws.
// Both run in parallel under OpenMP and have *_serial references that return
// bit-identical results.

#include <chrono>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <boost/multiprecision/cpp_int.hpp>

#include "modcs/numkit.hpp"
#include "modcs/rng.hpp"
#include "modcs/snc.hpp"

namespace modcs::probability {

using BigInt = boost::multiprecision::cpp_int;

inline constexpr std::uint64_t kDefaultSpaceCap = 100'000'000;
inline constexpr double kDefaultAlpha = 0.01;
/// Auto picks the certificate while 2^|delta| stays at or below this.
inline constexpr std::uint64_t kAutoCertificateLimit = 4096;

struct Scenario {
  std::size_t n = 0;
  std::size_t ell = 0;
  std::size_t p = 0;
  std::size_t p1 = 0;

  std::size_t p2() const noexcept { return p - p1; }
  /// |delta| = ell - p2
  std::size_t unknown() const noexcept { return ell - p2(); }

  /// Throws InvalidArgument naming the first violated inequality.
  void validate() const;
};

struct Quad {
  IndexSet support;      // N
  IndexSet known_true;   // S, subset of N
  IndexSet errors;       // H, disjoint from N
  SignPattern pattern;   // on N \ S

  IndexSet known() const { return known_true.set_union(errors); }
  const IndexSet& delta() const { return pattern.support(); }
  snc::SncInstance instance(const DenseMatrix& a) const;

  bool operator==(const Quad&) const = default;
};

enum class CheckerKind { Auto, SncCertificate, DirectSolve };
enum class Method { Exact, MonteCarlo };

const char* to_string(CheckerKind k) noexcept;
const char* to_string(Method m) noexcept;
/// Accepts "auto", "snc", "solve". Throws InvalidArgument otherwise.
CheckerKind parse_checker(const std::string& name);

/// Resolves Auto for a scenario; other kinds pass through.
CheckerKind resolve(CheckerKind k, const Scenario& s);

struct ProbabilityEstimate {
  double value = 0.0;
  Method method = Method::Exact;
  BigInt recoverable_count = 0;
  BigInt total_count = 0;
  std::optional<double> hoeffding_halfwidth;  // Monte Carlo only
  std::optional<std::uint64_t> seed;          // Monte Carlo only
  CheckerKind checker = CheckerKind::SncCertificate;
};

BigInt binomial(std::size_t n, std::size_t k);

/// C(n, ell) C(ell, p2) C(n - ell, p1) 2^(ell - p2)
BigInt quad_space_size(const Scenario& s);

/// Walks Z in lexicographic order: N outermost, then S, then H, then the sign
/// pattern read as a binary counter (bit j set means the j-th member of
/// delta is negative).
class QuadStream {
 public:
  /// Throws SpaceTooLarge when |Z| exceeds cap.
  explicit QuadStream(const Scenario& s, std::uint64_t cap = kDefaultSpaceCap);

  std::uint64_t size() const noexcept { return size_; }
  std::uint64_t position() const noexcept { return position_; }

  /// Jumps to the quad of the given rank (rank <= size()).
  void seek(std::uint64_t rank);
  /// Writes the current quad and advances; false once the stream is spent.
  bool next(Quad& out);

 private:
  Scenario s_;
  std::uint64_t size_ = 0;
  std::uint64_t position_ = 0;
  std::vector<std::size_t> n_combo_;
  std::vector<std::size_t> s_combo_;
  std::vector<std::size_t> h_combo_;
  std::uint64_t pattern_ = 0;
  std::uint64_t pattern_count_ = 1;
};

/// Whole stream materialized; meant for small scenarios and tests.
std::vector<Quad> enumerate_quads(const Scenario& s,
                                  std::uint64_t cap = kDefaultSpaceCap);

/// One uniform draw from Z.
Quad sample_quad(const Scenario& s, SeededStream& rng);

/// Stream feeding Monte Carlo draw `index` under `seed`.
SeededStream draw_stream(std::uint64_t seed, std::uint64_t index) noexcept;

/// Whether one quad is recovered under A. SncCertificate runs the subset
/// certificate; DirectSolve solves modified-CS once with unit magnitudes.
bool quad_recoverable(const DenseMatrix& a, const Quad& q, CheckerKind checker,
                      double margin_tol = snc::kDefaultMarginTol);

ProbabilityEstimate exact_probability(
    const DenseMatrix& a, const Scenario& s,
    CheckerKind checker = CheckerKind::Auto,
    double margin_tol = snc::kDefaultMarginTol,
    std::uint64_t cap = kDefaultSpaceCap);

ProbabilityEstimate exact_probability_serial(
    const DenseMatrix& a, const Scenario& s,
    CheckerKind checker = CheckerKind::Auto,
    double margin_tol = snc::kDefaultMarginTol,
    std::uint64_t cap = kDefaultSpaceCap);

using Deadline = std::optional<std::chrono::steady_clock::time_point>;

/// Per-draw verdicts (1 = recovered) for draws 0..M-1. Draw i depends only on
/// (seed, i), so any prefix equals the run with that smaller M. Throws
/// BudgetExceeded if the deadline passes first.
std::vector<std::uint8_t> mc_outcomes(const DenseMatrix& a, const Scenario& s,
                                      std::uint64_t samples, std::uint64_t seed,
                                      CheckerKind checker = CheckerKind::Auto,
                                      double margin_tol = snc::kDefaultMarginTol,
                                      Deadline deadline = std::nullopt);

std::vector<std::uint8_t> mc_outcomes_serial(
    const DenseMatrix& a, const Scenario& s, std::uint64_t samples,
    std::uint64_t seed, CheckerKind checker = CheckerKind::Auto,
    double margin_tol = snc::kDefaultMarginTol);

ProbabilityEstimate mc_probability(const DenseMatrix& a, const Scenario& s,
                                   std::uint64_t samples, std::uint64_t seed,
                                   CheckerKind checker = CheckerKind::Auto,
                                   double margin_tol = snc::kDefaultMarginTol,
                                   double alpha = kDefaultAlpha);

/// Builds the Monte Carlo estimate from the first `samples` verdicts.
ProbabilityEstimate summarize_outcomes(std::span<const std::uint8_t> outcomes,
                                       std::uint64_t samples, std::uint64_t seed,
                                       CheckerKind resolved_checker,
                                       double alpha = kDefaultAlpha);

/// sqrt(ln(2 / alpha) / (2 M))
double hoeffding_halfwidth(std::uint64_t samples, double alpha = kDefaultAlpha);

}  // namespace modcs::probability
