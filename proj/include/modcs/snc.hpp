#pragma once

// Exact-recovery certificate for modified-CS.
//
// x* (support N, known part T, unknown part delta = N \ T) is the unique
// minimizer of ||x_{T^c}||_1 s.t. Ax = Ax* iff
//   (a) A_T has full column rank, and
//   (b) for every I subset of delta, the LP
//         max  sum_{k in I} |d_k|
//         s.t. A d = 0,  sum_{k in T^c} |d_k| = 1,
//              sign(x*_k) d_k >= 0 for k in I,
//              sign(x*_k) d_k <= 0 for k in delta \ I
//       has value < 1/2 (an infeasible LP counts as 0).
// Condition (b) is positivity of sum_{T^c \ I}|d_k| - sum_I |d_k| on the
// null space rescaled so the T^c mass is one; (a) covers null vectors that
// vanish on T^c, which can never be rescaled that way.

#include <cstdint>
#include <optional>
#include <span>

#include "modcs/lp.hpp"
#include "modcs/numkit.hpp"
#include "modcs/recovery.hpp"

namespace modcs::snc {

inline constexpr double kDefaultMarginTol = 1e-7;
inline constexpr std::size_t kMaxDeltaSize = 30;

struct SncInstance {
  DenseMatrix a;
  IndexSet known;     // T
  IndexSet delta;     // N \ T
  SignPattern signs;  // sign(x*) on delta

  void validate() const;
};

struct SncReport {
  bool recoverable = false;
  bool rank_ok = false;
  /// The certificate's largest subset value sat within margin_tol of 1/2.
  bool marginal = false;
  IndexSet worst_subset;
  /// 1/2 minus the largest subset-LP maximum; empty when the rank test failed.
  std::optional<double> worst_margin;
  std::uint64_t subsets_checked = 0;
};

/// The subset-I program as a minimization of -sum_{k in I} w_k. Variables, in
/// coordinate order: one nonnegative w_k per k in delta (d_k = s_k w_k on I,
/// -s_k w_k off I), a nonnegative pair (u_k, v_k) per k in T^c \ delta, and
/// one free variable per k in T. Rows: A d = 0 followed by the T^c mass
/// normalization.
lp::LinearProgram build_subset_lp(const SncInstance& inst, const IndexSet& subset);

/// Index of the first LP variable attached to each coordinate of the
/// build_subset_lp layout.
std::vector<std::size_t> subset_lp_layout(const SncInstance& inst);

/// Maximum of the subset program, 0 when it is infeasible.
double subset_maximum(const SncInstance& inst, const IndexSet& subset,
                      double feas_tol = lp::kDefaultFeasTol);

/// Full certificate over all 2^|delta| subsets, evaluated in parallel.
/// Throws EnumerationTooLarge when |delta| > kMaxDeltaSize.
SncReport check_snc(const SncInstance& inst,
                    double margin_tol = kDefaultMarginTol);

/// Sequential reference for check_snc; identical output.
SncReport check_snc_serial(const SncInstance& inst,
                           double margin_tol = kDefaultMarginTol);

/// Verdict only: stops at the first subset that breaks the certificate.
/// Always equals check_snc(inst, margin_tol).recoverable.
bool certificate_holds(const SncInstance& inst,
                       double margin_tol = kDefaultMarginTol);

/// Builds x* with support known_true + delta (known_true must lie in T),
/// takes y = A x*, solves modified-CS and compares. `magnitudes` lists one
/// positive value per member of known_true + delta in increasing coordinate
/// order; known_true entries are taken positive, delta entries carry `signs`.
bool check_by_solving(const SncInstance& inst, const IndexSet& known_true,
                      std::span<const double> magnitudes,
                      double tol = recovery::kDefaultRecoveryTol);

/// Unit magnitudes on delta and no nonzeros inside T.
bool check_by_solving(const SncInstance& inst,
                      double tol = recovery::kDefaultRecoveryTol);

}  // namespace modcs::snc
