#pragma once

// Test-only reference computations. Nothing here goes through the simplex
// solver, the subset certificate or the library's rank routine.

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "modcs/lp.hpp"
#include "modcs/numkit.hpp"
#include "modcs/rng.hpp"

namespace oracle {

using modcs::DenseMatrix;
using modcs::IndexSet;
using modcs::RealVector;

inline DenseMatrix random_matrix(std::size_t m, std::size_t n,
                                 modcs::SeededStream& rng, double lo = -0.5,
                                 double hi = 0.5) {
  std::vector<double> e(m * n);
  for (double& v : e) v = rng.uniform(lo, hi);
  return DenseMatrix(m, n, std::move(e));
}

inline Eigen::MatrixXd to_eigen(const DenseMatrix& a) {
  Eigen::MatrixXd out(a.rows(), a.cols());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < a.cols(); ++j) out(i, j) = a(i, j);
  }
  return out;
}

/// Rank from singular values, relative threshold 1e-10.
inline std::size_t svd_rank(const DenseMatrix& a) {
  if (a.rows() == 0 || a.cols() == 0) return 0;
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(to_eigen(a));
  const auto& s = svd.singularValues();
  const double top = s.size() ? s(0) : 0.0;
  std::size_t r = 0;
  for (Eigen::Index i = 0; i < s.size(); ++i) {
    if (s(i) > 1e-10 * std::max(top, 1.0)) ++r;
  }
  return r;
}

/// Orthonormal basis of null(A) as columns, from a full SVD.
inline Eigen::MatrixXd null_space(const DenseMatrix& a) {
  Eigen::MatrixXd e = to_eigen(a);
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(e, Eigen::ComputeFullV);
  const std::size_t r = svd_rank(a);
  return svd.matrixV().rightCols(static_cast<Eigen::Index>(a.cols() - r));
}

/// The modified-CS program over split variables, assembled independently of
/// the recovery module.
inline modcs::lp::LinearProgram eq2_program(const DenseMatrix& a,
                                            const IndexSet& known,
                                            const RealVector& y) {
  const std::size_t m = a.rows(), n = a.cols();
  modcs::lp::LinearProgram prog;
  prog.num_vars = 2 * n;
  prog.objective.assign(2 * n, 0.0);
  prog.eq_lhs = DenseMatrix(m, 2 * n);
  for (std::size_t k = 0; k < n; ++k) {
    const double c = known.contains(k) ? 0.0 : 1.0;
    prog.objective[2 * k] = c;
    prog.objective[2 * k + 1] = c;
    for (std::size_t i = 0; i < m; ++i) {
      prog.eq_lhs(i, 2 * k) = a(i, k);
      prog.eq_lhs(i, 2 * k + 1) = -a(i, k);
    }
  }
  prog.eq_rhs = y;
  prog.nonneg = IndexSet::full(2 * n);
  return prog;
}

/// Optimal vertices of the modified-CS program mapped back to x.
inline std::vector<RealVector> eq2_optimal_points(const DenseMatrix& a,
                                                  const IndexSet& known,
                                                  const RealVector& y,
                                                  double tol = 1e-9) {
  std::vector<RealVector> out;
  for (const RealVector& uv :
       modcs::lp::enumerate_optimal_vertices(eq2_program(a, known, y), tol)) {
    RealVector x(a.cols());
    for (std::size_t k = 0; k < a.cols(); ++k) x[k] = uv[2 * k] - uv[2 * k + 1];
    out.push_back(std::move(x));
  }
  return out;
}

/// x* is the unique minimizer of the modified-CS program: every optimal
/// vertex equals x*, and the optimal face has no recession direction (a
/// null vector of A supported on T).
inline bool uniquely_recovers(const DenseMatrix& a, const IndexSet& known,
                              const RealVector& xstar, double tol = 1e-9) {
  const RealVector y = modcs::mat_vec(a, xstar);
  const auto pts = eq2_optimal_points(a, known, y, tol);
  if (pts.size() != 1) return false;
  if (modcs::max_abs_diff(pts[0], xstar) > 1e-7) return false;
  return svd_rank(modcs::columns(a, known)) == known.size();
}

}  // namespace oracle
