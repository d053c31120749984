#include "modcs/snc.hpp"

#include <cmath>
#include <exception>
#include <limits>
#include <string>

#include "modcs/errors.hpp"

namespace modcs::snc {

namespace {

void require_enumerable(const SncInstance& inst) {
  if (inst.delta.size() > kMaxDeltaSize) {
    throw EnumerationTooLarge("certificate enumerates 2^" +
                              std::to_string(inst.delta.size()) +
                              " subsets; limit is 2^" +
                              std::to_string(kMaxDeltaSize));
  }
}

bool rank_test(const SncInstance& inst) {
  return rank(columns(inst.a, inst.known)) == inst.known.size();
}

// Larger maximum wins; ties go to the lower mask so the result does not
// depend on evaluation order.
struct Worst {
  double value = -std::numeric_limits<double>::infinity();
  std::uint64_t mask = 0;

  void offer(double v, std::uint64_t m) {
    if (v > value || (v == value && m < mask)) {
      value = v;
      mask = m;
    }
  }
};

SncReport finish(const SncInstance& inst, const Worst& worst,
                 double margin_tol) {
  SncReport rep;
  rep.rank_ok = true;
  rep.subsets_checked = std::uint64_t{1} << inst.delta.size();
  rep.worst_subset = inst.delta.subset_from_mask(worst.mask);
  const double margin = 0.5 - worst.value;
  rep.worst_margin = margin;
  rep.marginal = std::abs(margin) <= margin_tol;
  rep.recoverable = margin > margin_tol;
  return rep;
}

}  // namespace

void SncInstance::validate() const {
  const std::size_t n = a.cols();
  if (known.universe() != n || delta.universe() != n) {
    throw DimensionMismatch("index sets must live in [0, n)");
  }
  if (!known.set_intersection(delta).empty()) {
    throw InvalidArgument("known support and delta must be disjoint");
  }
  if (signs.support() != delta) {
    throw InvalidArgument("sign pattern must be defined on delta");
  }
}

std::vector<std::size_t> subset_lp_layout(const SncInstance& inst) {
  const std::size_t n = inst.a.cols();
  std::vector<std::size_t> first(n);
  std::size_t next = 0;
  for (std::size_t k = 0; k < n; ++k) {
    first[k] = next;
    if (inst.known.contains(k) || inst.delta.contains(k)) {
      next += 1;
    } else {
      next += 2;
    }
  }
  return first;
}

lp::LinearProgram build_subset_lp(const SncInstance& inst,
                                  const IndexSet& subset) {
  inst.validate();
  if (subset.universe() != inst.a.cols() || !subset.is_subset_of(inst.delta)) {
    throw InvalidArgument("subset must be contained in delta");
  }
  const std::size_t m = inst.a.rows();
  const std::size_t n = inst.a.cols();
  const std::vector<std::size_t> first = subset_lp_layout(inst);
  const std::size_t vars =
      n == 0 ? 0
             : first[n - 1] + ((inst.known.contains(n - 1) ||
                                inst.delta.contains(n - 1))
                                   ? 1
                                   : 2);

  lp::LinearProgram prog;
  prog.num_vars = vars;
  prog.objective.assign(vars, 0.0);
  prog.eq_lhs = DenseMatrix(m + 1, vars);
  prog.eq_rhs.assign(m + 1, 0.0);
  prog.eq_rhs[m] = 1.0;
  std::vector<std::size_t> nonneg;
  nonneg.reserve(vars);

  for (std::size_t k = 0; k < n; ++k) {
    const std::size_t v = first[k];
    if (inst.known.contains(k)) {
      for (std::size_t i = 0; i < m; ++i) prog.eq_lhs(i, v) = inst.a(i, k);
    } else if (inst.delta.contains(k)) {
      const bool in_subset = subset.contains(k);
      const double s = inst.signs.sign_of(k);
      const double coef = in_subset ? s : -s;
      for (std::size_t i = 0; i < m; ++i) prog.eq_lhs(i, v) = coef * inst.a(i, k);
      prog.eq_lhs(m, v) = 1.0;
      if (in_subset) prog.objective[v] = -1.0;
      nonneg.push_back(v);
    } else {
      for (std::size_t i = 0; i < m; ++i) {
        prog.eq_lhs(i, v) = inst.a(i, k);
        prog.eq_lhs(i, v + 1) = -inst.a(i, k);
      }
      prog.eq_lhs(m, v) = 1.0;
      prog.eq_lhs(m, v + 1) = 1.0;
      nonneg.push_back(v);
      nonneg.push_back(v + 1);
    }
  }
  prog.nonneg = IndexSet(vars, std::move(nonneg));
  return prog;
}

double subset_maximum(const SncInstance& inst, const IndexSet& subset,
                      double feas_tol) {
  const lp::LpSolution sol = lp::solve(build_subset_lp(inst, subset), feas_tol);
  switch (sol.status) {
    case lp::Status::Optimal:
      return -sol.value;
    case lp::Status::Infeasible:
      return 0.0;
    case lp::Status::Unbounded:
      break;
  }
  // The normalization row bounds every variable except the T coordinates,
  // which carry no cost.
  throw NumericalFailure("subset program reported unbounded");
}

SncReport check_snc_serial(const SncInstance& inst, double margin_tol) {
  inst.validate();
  require_enumerable(inst);
  if (!(margin_tol > 0)) throw InvalidArgument("margin_tol must be positive");
  if (!rank_test(inst)) return SncReport{};

  Worst worst;
  const std::uint64_t count = std::uint64_t{1} << inst.delta.size();
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    worst.offer(subset_maximum(inst, inst.delta.subset_from_mask(mask)), mask);
  }
  return finish(inst, worst, margin_tol);
}

SncReport check_snc(const SncInstance& inst, double margin_tol) {
  inst.validate();
  require_enumerable(inst);
  if (!(margin_tol > 0)) throw InvalidArgument("margin_tol must be positive");
  if (!rank_test(inst)) return SncReport{};

  const std::int64_t count = std::int64_t{1} << inst.delta.size();
  Worst worst;
  std::exception_ptr failure;

#pragma omp parallel
  {
    Worst local;
#pragma omp for schedule(dynamic, 16) nowait
    for (std::int64_t mask = 0; mask < count; ++mask) {
      try {
        const auto m = static_cast<std::uint64_t>(mask);
        local.offer(subset_maximum(inst, inst.delta.subset_from_mask(m)), m);
      } catch (...) {
#pragma omp critical(modcs_snc_failure)
        if (!failure) failure = std::current_exception();
      }
    }
#pragma omp critical(modcs_snc_reduce)
    worst.offer(local.value, local.mask);
  }
  if (failure) std::rethrow_exception(failure);
  return finish(inst, worst, margin_tol);
}

bool certificate_holds(const SncInstance& inst, double margin_tol) {
  inst.validate();
  require_enumerable(inst);
  if (!(margin_tol > 0)) throw InvalidArgument("margin_tol must be positive");
  if (!rank_test(inst)) return false;
  const std::uint64_t count = std::uint64_t{1} << inst.delta.size();
  for (std::uint64_t mask = 0; mask < count; ++mask) {
    const double v = subset_maximum(inst, inst.delta.subset_from_mask(mask));
    if (0.5 - v <= margin_tol) return false;
  }
  return true;
}

bool check_by_solving(const SncInstance& inst, const IndexSet& known_true,
                      std::span<const double> magnitudes, double tol) {
  inst.validate();
  if (known_true.universe() != inst.a.cols() ||
      !known_true.is_subset_of(inst.known)) {
    throw InvalidArgument("known_true must be a subset of the known support");
  }
  const IndexSet support = known_true.set_union(inst.delta);
  if (magnitudes.size() != support.size()) {
    throw DimensionMismatch("need one magnitude per support member");
  }
  RealVector xstar(inst.a.cols(), 0.0);
  for (std::size_t i = 0; i < support.size(); ++i) {
    if (!(magnitudes[i] > 0)) {
      throw InvalidArgument("magnitudes must be strictly positive");
    }
    const std::size_t k = support[i];
    xstar[k] = inst.delta.contains(k) ? inst.signs.sign_of(k) * magnitudes[i]
                                      : magnitudes[i];
  }
  recovery::RecoveryProblem prob{inst.a, mat_vec(inst.a, xstar), inst.known};
  const RealVector xhat = recovery::solve_modified_cs(prob);
  return recovery::recovered(xhat, xstar, tol);
}

bool check_by_solving(const SncInstance& inst, double tol) {
  const RealVector ones(inst.delta.size(), 1.0);
  return check_by_solving(inst, IndexSet(inst.a.cols()), ones, tol);
}

}  // namespace modcs::snc
