#include <algorithm>
#include <cmath>

#include "doctest.h"
#include "modcs/errors.hpp"
#include "modcs/numkit.hpp"
#include "modcs/rng.hpp"
#include "oracles.hpp"

using namespace modcs;

TEST_CASE("mat_vec examples") {
  CHECK(mat_vec(DenseMatrix::identity(2), RealVector{3, -1}) == RealVector{3, -1});
  CHECK(mat_vec(DenseMatrix{{1, 1, 1}}, RealVector{1, 2, 3}) == RealVector{6});
  const DenseMatrix a{{1, 0, 0.3}, {0, 1, 0.3}};
  CHECK(mat_vec(a, RealVector{0, 0, 1}) == RealVector{0.3, 0.3});
  CHECK_THROWS_AS(mat_vec(a, RealVector{1, 2}), DimensionMismatch);
}

TEST_CASE("mat_vec is linear") {
  SeededStream rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    const std::size_t m = 1 + rng.below(6), n = 1 + rng.below(9);
    const DenseMatrix a = oracle::random_matrix(m, n, rng, -1, 1);
    RealVector x(n), y(n), combo(n);
    const double s = rng.uniform(-3, 3), t = rng.uniform(-3, 3);
    for (std::size_t j = 0; j < n; ++j) {
      x[j] = rng.uniform(-1, 1);
      y[j] = rng.uniform(-1, 1);
      combo[j] = s * x[j] + t * y[j];
    }
    const RealVector lhs = mat_vec(a, combo);
    const RealVector ax = mat_vec(a, x), ay = mat_vec(a, y);
    for (std::size_t i = 0; i < m; ++i) {
      const double rhs = s * ax[i] + t * ay[i];
      CHECK(std::abs(lhs[i] - rhs) <= 1e-12 * std::max(1.0, std::abs(rhs)));
    }
  }
}

TEST_CASE("columns examples") {
  const DenseMatrix a{{1, 0, 0.3}, {0, 1, 0.3}};
  CHECK(columns(a, IndexSet::full(3)) == a);
  CHECK(columns(a, IndexSet(3, {2})) == DenseMatrix{{0.3}, {0.3}});
  const DenseMatrix empty = columns(a, IndexSet(3));
  CHECK(empty.rows() == 2);
  CHECK(empty.cols() == 0);
  CHECK(rank(empty) == 0);
  CHECK_THROWS_AS(columns(a, IndexSet(4, {0})), DimensionMismatch);
}

TEST_CASE("rank examples") {
  CHECK(rank(DenseMatrix::identity(3)) == 3);
  CHECK(rank(DenseMatrix(2, 2)) == 0);
  CHECK(rank(DenseMatrix{{1, 2}, {2, 4}}) == 1);
  CHECK_THROWS_AS(rank(DenseMatrix::identity(2), 0.0), InvalidArgument);
}

TEST_CASE("rank properties on random matrices") {
  SeededStream rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t m = 1 + rng.below(6), n = 1 + rng.below(9);
    DenseMatrix a = oracle::random_matrix(m, n, rng);
    // Make some of them rank deficient by copying a row.
    if (m > 1 && trial % 3 == 0) {
      for (std::size_t j = 0; j < n; ++j) a(m - 1, j) = 2.0 * a(0, j);
    }
    const std::size_t r = rank(a);
    CHECK(r == oracle::svd_rank(a));

    DenseMatrix permuted(m, n), scaled(m, n);
    for (std::size_t i = 0; i < m; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        permuted(i, j) = a(m - 1 - i, j);
        scaled(i, j) = 2.0 * a(i, j);
      }
    }
    CHECK(rank(permuted) == r);
    CHECK(rank(scaled) == r);

    std::vector<std::size_t> picks;
    for (std::size_t j = 0; j < n; ++j) {
      if (rng.below(2)) picks.push_back(j);
    }
    const IndexSet s(n, picks);
    CHECK(rank(columns(a, s)) <= std::min(s.size(), m));
  }
}

TEST_CASE("solve_square") {
  const DenseMatrix b{{2, 1}, {1, 3}};
  RealVector z(2);
  REQUIRE(solve_square(b, RealVector{3, 5}, z));
  CHECK(z[0] == doctest::Approx(0.8));
  CHECK(z[1] == doctest::Approx(1.4));
  CHECK_FALSE(solve_square(DenseMatrix{{1, 2}, {2, 4}}, RealVector{1, 2}, z));
}

TEST_CASE("index sets") {
  const IndexSet s(6, {4, 1, 3});
  CHECK(s.members() == std::vector<std::size_t>{1, 3, 4});
  CHECK(s.complement() == IndexSet(6, {0, 2, 5}));
  CHECK(s.set_union(IndexSet(6, {0, 1})) == IndexSet(6, {0, 1, 3, 4}));
  CHECK(s.set_difference(IndexSet(6, {3})) == IndexSet(6, {1, 4}));
  CHECK(s.subset_from_mask(0b101) == IndexSet(6, {1, 4}));
  CHECK(s.position(3) == 1);
  CHECK(s.position(2) == 3);
  CHECK(to_string(s) == "{1,3,4}");
  CHECK_THROWS_AS(IndexSet(3, {1, 1}), InvalidArgument);
  CHECK_THROWS_AS(IndexSet(3, {3}), InvalidArgument);
}

TEST_CASE("sign patterns") {
  const SignPattern p(IndexSet(5, {0, 3}), {1, -1});
  CHECK(p.sign_of(3) == -1);
  CHECK_THROWS_AS(p.sign_of(1), InvalidArgument);
  CHECK_THROWS_AS(SignPattern(IndexSet(5, {0}), {1, 1}), DimensionMismatch);
  CHECK_THROWS_AS(SignPattern(IndexSet(5, {0}), {2}), InvalidArgument);
}

TEST_CASE("matrix construction rejects non-finite entries") {
  CHECK_THROWS_AS(DenseMatrix(1, 2, {1.0, NAN}), InvalidArgument);
  CHECK_THROWS_AS(DenseMatrix(1, 2, {1.0}), DimensionMismatch);
}
