#pragma once

// Scripted recovery-probability studies.
//
// fig1: one uniform 7x9 matrix; for ell = 2..7, p = 2, p1 = 0..2 the exact
//       probability next to the rate observed over random signals.
// fig2: Monte Carlo estimates for three matrix sizes over a grid of sample
//       counts.
//
// Seeds: fig1 draws its matrix from SeededStream(seed).substream(kMatrix) and
// its random signals from substream(kEmpirical). fig2 case c (0-based) uses
// seed + c both for its matrix and as the Monte Carlo seed, so a row can be
// reproduced with `modcs gen-matrix` followed by `modcs prob-mc`.

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "modcs/numkit.hpp"
#include "modcs/probability.hpp"
#include "modcs/recovery.hpp"
#include "modcs/rng.hpp"

namespace modcs::experiments {

using probability::CheckerKind;
using probability::Scenario;

enum class Scale { Reduced, Full };
const char* to_string(Scale s) noexcept;
/// "reduced" or "full"; throws InvalidArgument otherwise.
Scale parse_scale(const std::string& name);

inline constexpr double kMatrixLo = -0.5;
inline constexpr double kMatrixHi = 0.5;
/// Nonzero magnitudes of random signals are drawn from [kDeadZone, 1].
inline constexpr double kDeadZone = 0.05;

struct MatrixCase {
  std::size_t m = 0;
  std::size_t n = 0;
  std::vector<Scenario> scenarios;
  CheckerKind checker = CheckerKind::Auto;
  std::vector<std::uint64_t> sample_grid;  // empty: use the config grid
};

struct ExperimentConfig {
  std::uint64_t seed = 42;
  std::vector<MatrixCase> cases;
  std::uint64_t empirical_trials = 1000;
  std::vector<std::uint64_t> mc_sample_grid;
  Scale scale = Scale::Reduced;
  std::optional<std::chrono::duration<double>> case_budget;

  void validate() const;
};

ExperimentConfig example1_config(std::uint64_t seed);
ExperimentConfig example2_config(std::uint64_t seed, Scale scale);

struct CurvePoint {
  std::size_t case_m = 0;
  std::size_t case_n = 0;
  Scenario scenario;
  std::optional<double> theoretical;
  std::optional<double> empirical;
  std::optional<double> mc_value;
  std::optional<double> hoeffding_halfwidth;
  std::uint64_t samples_used = 0;
  std::uint64_t seed = 0;
  CheckerKind checker = CheckerKind::Auto;
  std::string status = "ok";
  double seconds = 0.0;
};

struct ToleranceCheck {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct ExperimentResult {
  std::vector<CurvePoint> points;
  std::vector<ToleranceCheck> checks;

  bool all_passed() const;
};

DenseMatrix gen_uniform_matrix(std::size_t m, std::size_t n, double lo, double hi,
                               SeededStream& rng);

/// The matrix `modcs gen-matrix --seed seed` writes.
DenseMatrix seeded_matrix(std::size_t m, std::size_t n, std::uint64_t seed,
                          double lo = kMatrixLo, double hi = kMatrixHi);

/// Fraction of `trials` random signals recovered by modified-CS. Trial i uses
/// rng.substream(i): a uniform quad, magnitudes uniform in [kDeadZone, 1],
/// the quad's signs on delta and fresh random signs on S.
double empirical_recovery_rate(const DenseMatrix& a, const Scenario& s,
                               std::uint64_t trials, const SeededStream& rng,
                               double tol = recovery::kDefaultRecoveryTol);

/// Writes fig1.csv and summary.json into out_dir. fig1.csv is rewritten after
/// every point, so a failed run leaves the finished rows behind.
ExperimentResult run_example1(const ExperimentConfig& cfg,
                              const std::filesystem::path& out_dir);

/// Writes fig2.csv and summary.json into out_dir.
ExperimentResult run_example2(const ExperimentConfig& cfg,
                              const std::filesystem::path& out_dir);

}  // namespace modcs::experiments
