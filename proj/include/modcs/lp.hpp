#pragma once

// Dense two-phase simplex plus a brute-force vertex enumerator used as a test
// oracle on small instances.

#include <cstddef>
#include <vector>

#include "modcs/numkit.hpp"

namespace modcs::lp {

inline constexpr double kDefaultFeasTol = 1e-9;

/// minimize objective . z  subject to  eq_lhs z = eq_rhs,  z_j >= 0 for j in
/// nonneg; every other variable is free.
struct LinearProgram {
  std::size_t num_vars = 0;
  RealVector objective;
  DenseMatrix eq_lhs;
  RealVector eq_rhs;
  IndexSet nonneg;

  /// Throws DimensionMismatch when the pieces disagree on sizes.
  void validate() const;
};

enum class Status { Optimal, Infeasible, Unbounded };

const char* to_string(Status s) noexcept;

struct LpSolution {
  Status status = Status::Infeasible;
  double value = 0.0;  // only meaningful when Optimal
  RealVector point;    // only meaningful when Optimal
};

struct SolveOptions {
  double feas_tol = kDefaultFeasTol;
  /// 0 selects the default cap of 50 * (rows + cols) of the standard form.
  std::size_t max_iterations = 0;
};

/// Two-phase tableau simplex with Bland's smallest-index rule. Free variables
/// are split into nonnegative pairs. Phase 1 reports Infeasible when its
/// optimum exceeds feas_tol. An Optimal answer has its basic values recomputed
/// from the original data and is checked against feas_tol before returning;
/// a point that fails the check raises NumericalFailure.
///
/// Throws MaxIterationsExceeded when the pivot cap is hit.
LpSolution solve(const LinearProgram& lp, const SolveOptions& opts = {});

inline LpSolution solve(const LinearProgram& lp, double feas_tol) {
  return solve(lp, SolveOptions{feas_tol, 0});
}

inline constexpr std::size_t kMaxEnumVars = 24;
inline constexpr std::size_t kMaxEnumRows = 12;

/// Every optimal basic feasible point of `lp`, found by trying all bases of
/// the standard form. Points are expressed in the original variables and
/// deduplicated at feas_tol in the max norm; an infeasible program yields an
/// empty list. The caller is responsible for boundedness: on an unbounded
/// program this returns the best vertices, which are not optimal.
///
/// Throws InstanceTooLarge when the standard form exceeds kMaxEnumVars
/// variables or kMaxEnumRows rows.
std::vector<RealVector> enumerate_optimal_vertices(
    const LinearProgram& lp, double feas_tol = kDefaultFeasTol);

}  // namespace modcs::lp
