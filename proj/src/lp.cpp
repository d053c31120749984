#include "modcs/lp.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "modcs/errors.hpp"

namespace modcs::lp {

namespace {

constexpr std::size_t kNone = std::numeric_limits<std::size_t>::max();
// Tableau entries at or below this magnitude never serve as pivots.
constexpr double kPivotTol = 1e-9;
constexpr double kCostTol = 1e-11;
constexpr double kRatioTieTol = 1e-12;
constexpr std::size_t kDegenerateStreak = 2000;
constexpr std::size_t kRefreshPeriod = 100;
constexpr std::size_t kReinvertPeriod = 500;
constexpr double kSingularTol = 1e-12;

// z_orig[j] = z_std[pos[j]] - z_std[neg[j]] (neg[j] == kNone for nonneg j).
struct StandardForm {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> a;  // rows x cols, row-major
  std::vector<double> b;
  std::vector<double> cost;
  std::vector<std::size_t> pos;
  std::vector<std::size_t> neg;

  double at(std::size_t i, std::size_t j) const { return a[i * cols + j]; }

  RealVector to_original(std::span<const double> z) const {
    RealVector x(pos.size());
    for (std::size_t j = 0; j < pos.size(); ++j) {
      x[j] = z[pos[j]] - (neg[j] == kNone ? 0.0 : z[neg[j]]);
    }
    return x;
  }
};

StandardForm to_standard_form(const LinearProgram& lp) {
  StandardForm sf;
  sf.rows = lp.eq_lhs.rows();
  sf.pos.assign(lp.num_vars, kNone);
  sf.neg.assign(lp.num_vars, kNone);
  std::size_t c = 0;
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    sf.pos[j] = c++;
    if (!lp.nonneg.contains(j)) sf.neg[j] = c++;
  }
  sf.cols = c;
  sf.a.assign(sf.rows * sf.cols, 0.0);
  sf.cost.assign(sf.cols, 0.0);
  for (std::size_t j = 0; j < lp.num_vars; ++j) {
    sf.cost[sf.pos[j]] = lp.objective[j];
    if (sf.neg[j] != kNone) sf.cost[sf.neg[j]] = -lp.objective[j];
  }
  for (std::size_t i = 0; i < sf.rows; ++i) {
    for (std::size_t j = 0; j < lp.num_vars; ++j) {
      const double v = lp.eq_lhs(i, j);
      sf.a[i * sf.cols + sf.pos[j]] = v;
      if (sf.neg[j] != kNone) sf.a[i * sf.cols + sf.neg[j]] = -v;
    }
  }
  sf.b = lp.eq_rhs;
  return sf;
}

double dot(std::span<const double> x, std::span<const double> y) {
  double acc = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) acc += x[i] * y[i];
  return acc;
}

bool satisfies(const LinearProgram& lp, std::span<const double> x,
               double feas_tol) {
  for (double v : x) {
    if (!std::isfinite(v)) return false;
  }
  RealVector ax = mat_vec(lp.eq_lhs, x);
  if (max_abs_diff(ax, lp.eq_rhs) > feas_tol) return false;
  for (std::size_t j : lp.nonneg) {
    if (x[j] < -feas_tol) return false;
  }
  return true;
}

// Phase-1 columns [cols, cols + rows) are artificials; the last column of the
// tableau holds the right-hand side.
class Tableau {
 public:
  explicit Tableau(const StandardForm& sf)
      : rows_(sf.rows),
        cols_(sf.cols),
        width_(sf.cols + sf.rows + 1),
        t_(rows_ * width_, 0.0),
        d_(width_, 0.0),
        basis_(rows_),
        removed_(rows_, false) {
    for (std::size_t i = 0; i < rows_; ++i) {
      const double flip = sf.b[i] < 0 ? -1.0 : 1.0;
      double* r = row(i);
      for (std::size_t j = 0; j < cols_; ++j) r[j] = flip * sf.at(i, j);
      r[cols_ + i] = 1.0;
      r[width_ - 1] = flip * sf.b[i];
      basis_[i] = cols_ + i;
    }
    orig_ = t_;
  }

  double* row(std::size_t i) { return t_.data() + i * width_; }
  const double* row(std::size_t i) const { return t_.data() + i * width_; }
  double rhs(std::size_t i) const { return row(i)[width_ - 1]; }
  const std::vector<std::size_t>& basis() const { return basis_; }
  bool removed(std::size_t i) const { return removed_[i]; }
  std::size_t rows() const { return rows_; }

  void load_phase1_costs() {
    cost_.assign(width_ - 1, 0.0);
    std::fill(cost_.begin() + static_cast<std::ptrdiff_t>(cols_), cost_.end(), 1.0);
    refresh_costs();
  }

  void load_phase2_costs(std::span<const double> cost) {
    cost_.assign(width_ - 1, 0.0);
    std::copy(cost.begin(), cost.end(), cost_.begin());
    refresh_costs();
  }

  // d = c - c_B B^-1 [A | b], recomputed from the current tableau rows.
  void refresh_costs() {
    std::fill(d_.begin(), d_.end(), 0.0);
    std::copy(cost_.begin(), cost_.end(), d_.begin());
    for (std::size_t i = 0; i < rows_; ++i) {
      if (removed_[i]) continue;
      const double cb = cost_[basis_[i]];
      if (cb == 0.0) continue;
      const double* r = row(i);
      for (std::size_t j = 0; j < width_; ++j) d_[j] -= cb * r[j];
    }
    for (std::size_t i = 0; i < rows_; ++i) {
      if (!removed_[i]) d_[basis_[i]] = 0.0;
    }
  }

  // Rebuilds the tableau as B^-1 times the original rows for the current
  // basis, discarding accumulated roundoff. Leaves the tableau untouched and
  // returns false if B looks singular.
  bool reinvert() {
    const std::size_t m = rows_;
    std::vector<double> lu(m * m);
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t c = 0; c < m; ++c) lu[r * m + c] = orig_[r * width_ + basis_[c]];
    }
    std::vector<double> x = orig_;
    auto xrow = [&](std::size_t r) { return x.data() + r * width_; };
    for (std::size_t k = 0; k < m; ++k) {
      std::size_t p = k;
      for (std::size_t i = k + 1; i < m; ++i) {
        if (std::abs(lu[i * m + k]) > std::abs(lu[p * m + k])) p = i;
      }
      if (std::abs(lu[p * m + k]) < kSingularTol) return false;
      if (p != k) {
        std::swap_ranges(lu.begin() + static_cast<std::ptrdiff_t>(p * m),
                         lu.begin() + static_cast<std::ptrdiff_t>((p + 1) * m),
                         lu.begin() + static_cast<std::ptrdiff_t>(k * m));
        std::swap_ranges(xrow(p), xrow(p) + width_, xrow(k));
      }
      for (std::size_t i = k + 1; i < m; ++i) {
        const double f = lu[i * m + k] / lu[k * m + k];
        if (f == 0.0) continue;
        for (std::size_t c = k; c < m; ++c) lu[i * m + c] -= f * lu[k * m + c];
        double* xi = xrow(i);
        const double* xk = xrow(k);
        for (std::size_t j = 0; j < width_; ++j) xi[j] -= f * xk[j];
      }
    }
    for (std::size_t k = m; k-- > 0;) {
      double* xk = xrow(k);
      for (std::size_t c = k + 1; c < m; ++c) {
        const double f = lu[k * m + c];
        if (f == 0.0) continue;
        const double* xc = xrow(c);
        for (std::size_t j = 0; j < width_; ++j) xk[j] -= f * xc[j];
      }
      const double inv = 1.0 / lu[k * m + k];
      for (std::size_t j = 0; j < width_; ++j) xk[j] *= inv;
    }
    for (std::size_t r = 0; r < m; ++r) {
      for (std::size_t i = 0; i < m; ++i) xrow(i)[basis_[r]] = i == r ? 1.0 : 0.0;
    }
    t_ = std::move(x);
    refresh_costs();
    return true;
  }

  // Reinverts, or failing that recomputes the reduced costs.
  void clean_up() {
    if (!reinvert()) refresh_costs();
  }

  double artificial_mass() const {
    double s = 0.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (!removed_[i] && basis_[i] >= cols_) s += std::abs(rhs(i));
    }
    return s;
  }

  enum class Outcome { Optimal, Unbounded };

  // Dantzig pricing (most negative reduced cost). After kDegenerateStreak
  // consecutive degenerate pivots it switches to Bland's rule (lowest-index
  // improving column enters; among tied rows the lowest-index basic variable
  // leaves) until the next pivot that makes progress. Bland cannot cycle and
  // the objective strictly drops between streaks, so the loop terminates.
  // Only structural columns may enter. Optimal and Unbounded verdicts are
  // confirmed against a freshly reinverted tableau before being returned.
  Outcome run(std::size_t& iterations, std::size_t cap) {
    bool bland = false;
    bool fresh = false;
    std::size_t degenerate = 0;
    for (;;) {
      const std::size_t enter = entering_column(bland);
      if (enter == kNone) {
        if (fresh) return Outcome::Optimal;
        clean_up();
        fresh = true;
        continue;
      }

      std::size_t leave = kNone;
      double best = std::numeric_limits<double>::infinity();
      for (std::size_t i = 0; i < rows_; ++i) {
        if (removed_[i]) continue;
        const double aij = row(i)[enter];
        if (aij <= kPivotTol) continue;
        const double ratio = std::max(rhs(i), 0.0) / aij;
        if (ratio < best - kRatioTieTol) {
          best = ratio;
          leave = i;
        } else if (ratio <= best + kRatioTieTol) {
          const bool better =
              bland ? basis_[i] < basis_[leave]
                    : aij > row(leave)[enter] ||
                          (aij == row(leave)[enter] && basis_[i] < basis_[leave]);
          if (better) leave = i;
        }
      }
      if (leave == kNone) {
        if (fresh) return Outcome::Unbounded;
        clean_up();
        fresh = true;
        continue;
      }

      if (++iterations > cap) {
        throw MaxIterationsExceeded("simplex pivot cap of " +
                                    std::to_string(cap) + " reached");
      }
      degenerate = best <= kRatioTieTol ? degenerate + 1 : 0;
      bland = degenerate > kDegenerateStreak;
      pivot(leave, enter);
      fresh = false;
      if (iterations % kReinvertPeriod == 0) {
        clean_up();
        fresh = true;
      } else if (iterations % kRefreshPeriod == 0) {
        refresh_costs();
        fresh = true;
      }
    }
  }

  // Moves basic artificials out of the basis. A row whose structural part
  // has no usable pivot is linearly dependent on the others; it keeps its
  // artificial (at level zero) and is skipped by later ratio tests.
  void expel_artificials() {
    for (std::size_t i = 0; i < rows_; ++i) {
      if (removed_[i] || basis_[i] < cols_) continue;
      const double* r = row(i);
      std::size_t best = kNone;
      double best_abs = kPivotTol;
      for (std::size_t j = 0; j < cols_; ++j) {
        if (std::abs(r[j]) > best_abs) {
          best_abs = std::abs(r[j]);
          best = j;
        }
      }
      if (best == kNone) {
        removed_[i] = true;
      } else {
        pivot(i, best);
      }
    }
  }

  RealVector basic_point() const {
    RealVector z(cols_, 0.0);
    for (std::size_t i = 0; i < rows_; ++i) {
      if (!removed_[i] && basis_[i] < cols_) z[basis_[i]] = rhs(i);
    }
    return z;
  }

 private:
  std::size_t entering_column(bool bland) const {
    std::size_t enter = kNone;
    double most = -kCostTol;
    for (std::size_t j = 0; j < cols_; ++j) {
      if (d_[j] < most) {
        enter = j;
        if (bland) break;
        most = d_[j];
      }
    }
    return enter;
  }

  void pivot(std::size_t pr, std::size_t pc) {
    double* prow = row(pr);
    const double inv = 1.0 / prow[pc];
    for (std::size_t j = 0; j < width_; ++j) prow[j] *= inv;
    prow[pc] = 1.0;
    for (std::size_t i = 0; i < rows_; ++i) {
      if (i == pr) continue;
      double* r = row(i);
      const double f = r[pc];
      if (f == 0.0) continue;
      for (std::size_t j = 0; j < width_; ++j) r[j] -= f * prow[j];
      r[pc] = 0.0;
    }
    const double f = d_[pc];
    if (f != 0.0) {
      for (std::size_t j = 0; j < width_; ++j) d_[j] -= f * prow[j];
      d_[pc] = 0.0;
    }
    basis_[pr] = pc;
  }

  std::size_t rows_;
  std::size_t cols_;
  std::size_t width_;
  std::vector<double> t_;
  std::vector<double> orig_;
  std::vector<double> d_;
  std::vector<double> cost_;
  std::vector<std::size_t> basis_;
  std::vector<bool> removed_;
};

// Recomputes the basic values from the original rows so tableau drift does
// not leak into the answer. Returns an empty vector when that is impossible.
RealVector refine_basic_point(const StandardForm& sf, const Tableau& tab) {
  std::vector<std::size_t> keep_rows;
  std::vector<std::size_t> basic_cols;
  for (std::size_t i = 0; i < tab.rows(); ++i) {
    if (tab.removed(i)) continue;
    if (tab.basis()[i] >= sf.cols) return {};
    keep_rows.push_back(i);
    basic_cols.push_back(tab.basis()[i]);
  }
  const std::size_t k = keep_rows.size();
  DenseMatrix bmat(k, k);
  RealVector f(k);
  for (std::size_t r = 0; r < k; ++r) {
    for (std::size_t c = 0; c < k; ++c) {
      bmat(r, c) = sf.at(keep_rows[r], basic_cols[c]);
    }
    f[r] = sf.b[keep_rows[r]];
  }
  RealVector zb(k);
  if (!solve_square(bmat, f, zb, 1e-13)) return {};
  RealVector z(sf.cols, 0.0);
  for (std::size_t c = 0; c < k; ++c) z[basic_cols[c]] = zb[c];
  return z;
}

}  // namespace

void LinearProgram::validate() const {
  if (objective.size() != num_vars) {
    throw DimensionMismatch("objective length != num_vars");
  }
  if (eq_lhs.cols() != num_vars) {
    throw DimensionMismatch("constraint matrix cols != num_vars");
  }
  if (eq_rhs.size() != eq_lhs.rows()) {
    throw DimensionMismatch("rhs length != constraint rows");
  }
  if (nonneg.universe() != num_vars) {
    throw DimensionMismatch("nonneg universe != num_vars");
  }
}

const char* to_string(Status s) noexcept {
  switch (s) {
    case Status::Optimal:
      return "Optimal";
    case Status::Infeasible:
      return "Infeasible";
    case Status::Unbounded:
      return "Unbounded";
  }
  return "?";
}

LpSolution solve(const LinearProgram& lp, const SolveOptions& opts) {
  lp.validate();
  if (!(opts.feas_tol > 0)) throw InvalidArgument("feas_tol must be positive");

  const StandardForm sf = to_standard_form(lp);
  const std::size_t cap = opts.max_iterations != 0
                              ? opts.max_iterations
                              : 50 * (sf.rows + sf.cols);
  std::size_t iterations = 0;

  Tableau tab(sf);
  tab.load_phase1_costs();
  tab.run(iterations, cap);
  if (tab.artificial_mass() > opts.feas_tol) return {Status::Infeasible, 0.0, {}};
  tab.expel_artificials();

  tab.load_phase2_costs(sf.cost);
  if (tab.run(iterations, cap) == Tableau::Outcome::Unbounded) {
    return {Status::Unbounded, 0.0, {}};
  }

  LpSolution sol;
  sol.status = Status::Optimal;
  RealVector refined = refine_basic_point(sf, tab);
  if (!refined.empty()) sol.point = sf.to_original(refined);
  if (refined.empty() || !satisfies(lp, sol.point, opts.feas_tol)) {
    sol.point = sf.to_original(tab.basic_point());
    if (!satisfies(lp, sol.point, opts.feas_tol)) {
      throw NumericalFailure(
          "simplex terminated at a point that violates feasibility");
    }
  }
  sol.value = dot(lp.objective, sol.point);
  return sol;
}

std::vector<RealVector> enumerate_optimal_vertices(const LinearProgram& lp,
                                                   double feas_tol) {
  lp.validate();
  const StandardForm sf = to_standard_form(lp);
  if (sf.cols > kMaxEnumVars || sf.rows > kMaxEnumRows) {
    throw InstanceTooLarge("vertex enumeration limited to " +
                           std::to_string(kMaxEnumVars) + " variables and " +
                           std::to_string(kMaxEnumRows) + " rows");
  }

  // Keep a maximal independent subset of rows; reject inconsistent systems.
  std::vector<std::size_t> keep;
  {
    std::vector<double> acc;
    std::size_t acc_rank = 0;
    for (std::size_t i = 0; i < sf.rows; ++i) {
      std::vector<double> trial = acc;
      trial.insert(trial.end(), sf.a.begin() + i * sf.cols,
                   sf.a.begin() + (i + 1) * sf.cols);
      const std::size_t r =
          rank(DenseMatrix(keep.size() + 1, sf.cols, trial));
      if (r > acc_rank) {
        acc = std::move(trial);
        acc_rank = r;
        keep.push_back(i);
      }
    }
    std::vector<double> aug;
    for (std::size_t i = 0; i < sf.rows; ++i) {
      aug.insert(aug.end(), sf.a.begin() + i * sf.cols,
                 sf.a.begin() + (i + 1) * sf.cols);
      aug.push_back(sf.b[i]);
    }
    if (sf.rows > 0 &&
        rank(DenseMatrix(sf.rows, sf.cols + 1, aug)) > acc_rank) {
      return {};
    }
  }

  const std::size_t k = keep.size();
  struct Candidate {
    double value;
    RealVector z;
  };
  std::vector<Candidate> feasible;

  std::vector<std::size_t> combo(k);
  for (std::size_t i = 0; i < k; ++i) combo[i] = i;
  DenseMatrix bmat(k, k);
  RealVector f(k);
  for (std::size_t r = 0; r < k; ++r) f[r] = sf.b[keep[r]];
  RealVector zb(k);

  if (k <= sf.cols) {
    for (;;) {
      for (std::size_t r = 0; r < k; ++r) {
        for (std::size_t c = 0; c < k; ++c) bmat(r, c) = sf.at(keep[r], combo[c]);
      }
      if (solve_square(bmat, f, zb) &&
          std::all_of(zb.begin(), zb.end(),
                      [&](double v) { return v >= -feas_tol; })) {
        RealVector z(sf.cols, 0.0);
        for (std::size_t c = 0; c < k; ++c) z[combo[c]] = std::max(zb[c], 0.0);
        feasible.push_back({dot(sf.cost, z), std::move(z)});
      }
      // next k-combination of [0, cols) in lexicographic order
      std::size_t i = k;
      while (i > 0 && combo[i - 1] == sf.cols - k + i - 1) --i;
      if (i == 0) break;
      ++combo[i - 1];
      for (std::size_t j = i; j < k; ++j) combo[j] = combo[j - 1] + 1;
    }
  }
  if (feasible.empty()) return {};

  double best = std::numeric_limits<double>::infinity();
  for (const auto& c : feasible) best = std::min(best, c.value);

  std::vector<RealVector> out;
  for (const auto& c : feasible) {
    if (c.value > best + feas_tol) continue;
    RealVector x = sf.to_original(c.z);
    const bool dup = std::any_of(out.begin(), out.end(), [&](const RealVector& o) {
      return max_abs_diff(o, x) < feas_tol;
    });
    if (!dup) out.push_back(std::move(x));
  }
  return out;
}

}  // namespace modcs::lp
