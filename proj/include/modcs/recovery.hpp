#pragma once

// Modified-CS (min ||x_{T^c}||_1 s.t. Ax = y) and Basis Pursuit (T empty),
// both posed as linear programs.

#include "modcs/lp.hpp"
#include "modcs/numkit.hpp"

namespace modcs::recovery {

inline constexpr double kDefaultRecoveryTol = 1e-6;

struct RecoveryProblem {
  DenseMatrix a;
  RealVector y;
  IndexSet known;  // T, universe a.cols()

  void validate() const;
};

/// LP over 2n nonnegative variables (u_0..u_{n-1}, v_0..v_{n-1}) with
/// x = u - v; cost 1 on both halves of every coordinate outside T.
lp::LinearProgram build_modified_cs_lp(const RecoveryProblem& p);

/// Maps a point of build_modified_cs_lp back to x.
RealVector split_to_signal(std::span<const double> uv);

/// A minimizer of the T^c l1 mass subject to Ax = y. When the optimum is not
/// unique this is whichever vertex the simplex reaches.
///
/// Throws InfeasibleSystem if y is not in the range of A.
RealVector solve_modified_cs(const RecoveryProblem& p,
                             double feas_tol = lp::kDefaultFeasTol);

RealVector solve_basis_pursuit(const DenseMatrix& a, const RealVector& y,
                               double feas_tol = lp::kDefaultFeasTol);

/// ||xhat - xstar||_inf <= tol
bool recovered(std::span<const double> xhat, std::span<const double> xstar,
               double tol = kDefaultRecoveryTol);

/// Sum of |x_k| over k outside `known`.
double off_support_l1(std::span<const double> x, const IndexSet& known);

}  // namespace modcs::recovery
