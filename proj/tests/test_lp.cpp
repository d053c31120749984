#include <cmath>
#include <cstring>

#include "doctest.h"
#include "modcs/errors.hpp"
#include "modcs/lp.hpp"
#include "oracles.hpp"

using namespace modcs;
using lp::LinearProgram;
using lp::Status;

namespace {

LinearProgram make(RealVector c, DenseMatrix e, RealVector f, IndexSet nonneg) {
  LinearProgram prog;
  prog.num_vars = c.size();
  prog.objective = std::move(c);
  prog.eq_lhs = std::move(e);
  prog.eq_rhs = std::move(f);
  prog.nonneg = std::move(nonneg);
  return prog;
}

bool contains_point(const std::vector<RealVector>& pts, const RealVector& x) {
  for (const auto& p : pts) {
    if (max_abs_diff(p, x) < 1e-9) return true;
  }
  return false;
}

// Random feasible program: z0 >= 0 is a witness; a third of the time a
// budget row sum(z) = sum(z0) keeps it bounded.
LinearProgram random_program(SeededStream& rng) {
  const std::size_t vars = 2 + rng.below(6);
  const std::size_t rows = 1 + rng.below(std::min<std::size_t>(vars, 4));
  std::vector<std::size_t> nonneg;
  for (std::size_t j = 0; j < vars; ++j) {
    if (rng.below(4) != 0) nonneg.push_back(j);
  }
  RealVector z0(vars);
  for (std::size_t j = 0; j < vars; ++j) {
    z0[j] = rng.below(3) == 0 ? 0.0 : rng.uniform(0, 1);
  }
  const bool budget = rng.below(3) == 0;
  DenseMatrix e = oracle::random_matrix(rows + (budget ? 1 : 0), vars, rng, -1, 1);
  if (budget) {
    for (std::size_t j = 0; j < vars; ++j) e(rows, j) = 1.0;
  }
  RealVector c(vars);
  for (double& v : c) v = rng.uniform(-1, 1);
  RealVector f = mat_vec(e, z0);
  return make(c, e, f, IndexSet(vars, nonneg));
}

}  // namespace

TEST_CASE("solve: spec examples") {
  const auto budget = make({-1, -1}, DenseMatrix{{1, 1}}, {1}, IndexSet::full(2));
  const auto s1 = lp::solve(budget);
  REQUIRE(s1.status == Status::Optimal);
  CHECK(s1.value == doctest::Approx(-1.0));

  const auto infeasible = make({1}, DenseMatrix{{1}}, {-1}, IndexSet::full(1));
  CHECK(lp::solve(infeasible).status == Status::Infeasible);

  const auto ray = make({-1, 0}, DenseMatrix{{1, -1}}, {0}, IndexSet::full(2));
  CHECK(lp::solve(ray).status == Status::Unbounded);
}

TEST_CASE("solve: free variables and redundant rows") {
  // min z0 + z1 with z0 free, z1 >= 0, z0 - z1 = -2 duplicated -> z0 = -2.
  const auto prog = make({1, 1}, DenseMatrix{{1, -1}, {2, -2}}, {-2, -4},
                         IndexSet(2, {1}));
  const auto sol = lp::solve(prog);
  REQUIRE(sol.status == Status::Optimal);
  CHECK(sol.point[0] == doctest::Approx(-2.0));
  CHECK(sol.point[1] == doctest::Approx(0.0));
  CHECK(sol.value == doctest::Approx(-2.0));

  // No rows at all.
  const auto none = make({1, 0}, DenseMatrix(0, 2), {}, IndexSet::full(2));
  const auto zero = lp::solve(none);
  REQUIRE(zero.status == Status::Optimal);
  CHECK(zero.value == 0.0);
  const auto free_none = make({1}, DenseMatrix(0, 1), {}, IndexSet(1));
  CHECK(lp::solve(free_none).status == Status::Unbounded);
}

TEST_CASE("solve: iteration cap") {
  const auto prog = make({-1, -1, 0}, DenseMatrix{{1, 1, 1}, {1, -1, 0}},
                         {1, 0}, IndexSet::full(3));
  CHECK_THROWS_AS(lp::solve(prog, lp::SolveOptions{1e-9, 1}),
                  MaxIterationsExceeded);
}

TEST_CASE("solve: degenerate program that cycles under naive pricing") {
  // Beale's example with explicit slacks x0..x2; optimum -5/4.
  const auto prog = make({0, 0, 0, -0.75, 20, -0.5, 6},
                         DenseMatrix{{1, 0, 0, 0.25, -8, -1, 9},
                                     {0, 1, 0, 0.5, -12, -0.5, 3},
                                     {0, 0, 1, 0, 0, 1, 0}},
                         {0, 0, 1}, IndexSet::full(7));
  const auto sol = lp::solve(prog);
  REQUIRE(sol.status == Status::Optimal);
  CHECK(sol.value == doctest::Approx(-1.25).epsilon(1e-12));
}

TEST_CASE("solve: malformed programs") {
  auto prog = make({1, 2}, DenseMatrix{{1}}, {1}, IndexSet::full(2));
  CHECK_THROWS_AS(lp::solve(prog), DimensionMismatch);
}

TEST_CASE("enumerate_optimal_vertices: examples") {
  const auto tie = make({1, 1}, DenseMatrix{{1, 1}}, {1}, IndexSet::full(2));
  const auto v1 = lp::enumerate_optimal_vertices(tie);
  CHECK(v1.size() == 2);
  CHECK(contains_point(v1, {1, 0}));
  CHECK(contains_point(v1, {0, 1}));

  const auto single = make({-1, 0}, DenseMatrix{{1, 1}}, {1}, IndexSet::full(2));
  const auto v2 = lp::enumerate_optimal_vertices(single);
  REQUIRE(v2.size() == 1);
  CHECK(max_abs_diff(v2[0], RealVector{1, 0}) < 1e-12);

  const DenseMatrix a{{1, 0, 0.5}, {0, 1, 0.5}};
  const auto pts = oracle::eq2_optimal_points(a, IndexSet(3), {0.5, 0.5});
  CHECK(pts.size() == 2);
  CHECK(contains_point(pts, {0.5, 0.5, 0}));
  CHECK(contains_point(pts, {0, 0, 1}));

  const auto infeasible = make({1}, DenseMatrix{{1}}, {-1}, IndexSet::full(1));
  CHECK(lp::enumerate_optimal_vertices(infeasible).empty());
}

TEST_CASE("enumerate_optimal_vertices: size guard") {
  const auto wide = make(RealVector(25, 1.0), DenseMatrix(1, 25), {0},
                         IndexSet::full(25));
  CHECK_THROWS_AS(lp::enumerate_optimal_vertices(wide), InstanceTooLarge);
  const auto free13 = make(RealVector(13, 1.0), DenseMatrix(1, 13), {0},
                           IndexSet(13));  // 26 standard-form columns
  CHECK_THROWS_AS(lp::enumerate_optimal_vertices(free13), InstanceTooLarge);
}

TEST_CASE("solve agrees with vertex enumeration on random programs") {
  SeededStream rng(2024);
  int bounded = 0, attempts = 0;
  while (bounded < 250 && attempts < 5000) {
    ++attempts;
    const LinearProgram prog = random_program(rng);
    const auto sol = lp::solve(prog);
    REQUIRE(sol.status != Status::Infeasible);  // z0 is feasible
    if (sol.status == Status::Unbounded) continue;
    ++bounded;

    const auto verts = lp::enumerate_optimal_vertices(prog);
    REQUIRE_FALSE(verts.empty());
    double best = 0;
    for (std::size_t j = 0; j < prog.num_vars; ++j) {
      best += prog.objective[j] * verts[0][j];
    }
    CHECK(std::abs(sol.value - best) <= 1e-8);

    // Invariants of an Optimal answer.
    const RealVector r = mat_vec(prog.eq_lhs, sol.point);
    CHECK(max_abs_diff(r, prog.eq_rhs) <= 1e-9);
    for (std::size_t j : prog.nonneg) CHECK(sol.point[j] >= -1e-9);

    // Pinning the objective at the optimum keeps the program feasible.
    std::vector<double> rows(prog.eq_lhs.data().begin(), prog.eq_lhs.data().end());
    rows.insert(rows.end(), prog.objective.begin(), prog.objective.end());
    LinearProgram pinned = prog;
    pinned.eq_lhs = DenseMatrix(prog.eq_lhs.rows() + 1, prog.num_vars, rows);
    pinned.eq_rhs.push_back(sol.value);
    CHECK(lp::solve(pinned).status == Status::Optimal);

    // Determinism: bit-identical rerun.
    const auto again = lp::solve(prog);
    CHECK(std::memcmp(&again.value, &sol.value, sizeof(double)) == 0);
    CHECK(again.point == sol.point);
  }
  CHECK(bounded >= 200);
}
