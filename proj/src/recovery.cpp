#include "modcs/recovery.hpp"

#include <cmath>

#include "modcs/errors.hpp"

namespace modcs::recovery {

void RecoveryProblem::validate() const {
  if (y.size() != a.rows()) {
    throw DimensionMismatch("measurement length != matrix rows");
  }
  if (known.universe() != a.cols()) {
    throw DimensionMismatch("known-support universe != matrix cols");
  }
}

lp::LinearProgram build_modified_cs_lp(const RecoveryProblem& p) {
  p.validate();
  const std::size_t m = p.a.rows();
  const std::size_t n = p.a.cols();
  lp::LinearProgram prog;
  prog.num_vars = 2 * n;
  prog.objective.assign(2 * n, 0.0);
  for (std::size_t k = 0; k < n; ++k) {
    if (!p.known.contains(k)) {
      prog.objective[k] = 1.0;
      prog.objective[n + k] = 1.0;
    }
  }
  prog.eq_lhs = DenseMatrix(m, 2 * n);
  for (std::size_t i = 0; i < m; ++i) {
    for (std::size_t k = 0; k < n; ++k) {
      prog.eq_lhs(i, k) = p.a(i, k);
      prog.eq_lhs(i, n + k) = -p.a(i, k);
    }
  }
  prog.eq_rhs = p.y;
  prog.nonneg = IndexSet::full(2 * n);
  return prog;
}

RealVector split_to_signal(std::span<const double> uv) {
  const std::size_t n = uv.size() / 2;
  RealVector x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = uv[k] - uv[n + k];
  return x;
}

RealVector solve_modified_cs(const RecoveryProblem& p, double feas_tol) {
  const lp::LinearProgram prog = build_modified_cs_lp(p);
  const lp::LpSolution sol = lp::solve(prog, feas_tol);
  switch (sol.status) {
    case lp::Status::Optimal:
      return split_to_signal(sol.point);
    case lp::Status::Infeasible:
      throw InfeasibleSystem("measurements are not in the range of A");
    case lp::Status::Unbounded:
      break;
  }
  // The objective is nonnegative, so this is solver breakdown.
  throw NumericalFailure("modified-CS program reported unbounded");
}

RealVector solve_basis_pursuit(const DenseMatrix& a, const RealVector& y,
                               double feas_tol) {
  return solve_modified_cs({a, y, IndexSet(a.cols())}, feas_tol);
}

bool recovered(std::span<const double> xhat, std::span<const double> xstar,
               double tol) {
  if (!(tol > 0)) throw InvalidArgument("tol must be positive");
  return max_abs_diff(xhat, xstar) <= tol;
}

double off_support_l1(std::span<const double> x, const IndexSet& known) {
  double s = 0.0;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (!known.contains(k)) s += std::abs(x[k]);
  }
  return s;
}

}  // namespace modcs::recovery
