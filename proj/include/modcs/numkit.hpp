#pragma once

// Dense real linear algebra and the index-set / sign-pattern types shared by
// every other module. Indices are 0-based everywhere.

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace modcs {

using RealVector = std::vector<double>;

/// Row-major dense matrix of finite doubles.
///
/// Zero-column matrices are legal (column selection with an empty index set
/// produces one); they have rank 0.
class DenseMatrix {
 public:
  DenseMatrix() = default;
  DenseMatrix(std::size_t rows, std::size_t cols);
  /// Takes ownership of `entries` (row-major, rows*cols long). Throws
  /// InvalidArgument on a size mismatch or a non-finite entry.
  DenseMatrix(std::size_t rows, std::size_t cols, std::vector<double> entries);
  DenseMatrix(std::initializer_list<std::initializer_list<double>> rows);

  static DenseMatrix identity(std::size_t n);

  std::size_t rows() const noexcept { return rows_; }
  std::size_t cols() const noexcept { return cols_; }

  double operator()(std::size_t i, std::size_t j) const noexcept {
    return data_[i * cols_ + j];
  }
  double& operator()(std::size_t i, std::size_t j) noexcept {
    return data_[i * cols_ + j];
  }

  std::span<const double> row(std::size_t i) const noexcept {
    return {data_.data() + i * cols_, cols_};
  }
  std::span<const double> data() const noexcept { return data_; }

  bool operator==(const DenseMatrix&) const = default;

 private:
  std::size_t rows_ = 0;
  std::size_t cols_ = 0;
  std::vector<double> data_;
};

/// Sorted, duplicate-free subset of [0, universe).
class IndexSet {
 public:
  IndexSet() = default;
  explicit IndexSet(std::size_t universe) : universe_(universe) {}
  /// Members may arrive in any order; duplicates or out-of-range members
  /// throw InvalidArgument.
  IndexSet(std::size_t universe, std::vector<std::size_t> members);
  IndexSet(std::size_t universe, std::initializer_list<std::size_t> members)
      : IndexSet(universe, std::vector<std::size_t>(members)) {}

  static IndexSet full(std::size_t universe);

  std::size_t universe() const noexcept { return universe_; }
  std::size_t size() const noexcept { return members_.size(); }
  bool empty() const noexcept { return members_.empty(); }
  std::size_t operator[](std::size_t i) const noexcept { return members_[i]; }
  const std::vector<std::size_t>& members() const noexcept { return members_; }
  auto begin() const noexcept { return members_.begin(); }
  auto end() const noexcept { return members_.end(); }

  bool contains(std::size_t k) const noexcept;
  /// Position of k among the members, or size() when absent.
  std::size_t position(std::size_t k) const noexcept;
  bool is_subset_of(const IndexSet& other) const;

  IndexSet complement() const;
  IndexSet set_union(const IndexSet& other) const;
  IndexSet set_difference(const IndexSet& other) const;
  IndexSet set_intersection(const IndexSet& other) const;
  /// Members of this set picked by a bit mask over positions.
  IndexSet subset_from_mask(std::uint64_t mask) const;

  bool operator==(const IndexSet&) const = default;

 private:
  std::size_t universe_ = 0;
  std::vector<std::size_t> members_;
};

std::string to_string(const IndexSet& s);

/// One sign (+1 or -1) per member of `support`.
class SignPattern {
 public:
  SignPattern() = default;
  explicit SignPattern(IndexSet support);  // all +1
  SignPattern(IndexSet support, std::vector<int> signs);

  const IndexSet& support() const noexcept { return support_; }
  const std::vector<int>& signs() const noexcept { return signs_; }
  std::size_t size() const noexcept { return signs_.size(); }
  /// Sign attached to the member at position i of the support.
  int sign_at(std::size_t i) const noexcept { return signs_[i]; }
  /// Sign attached to coordinate k; k must be a member of the support.
  int sign_of(std::size_t k) const;

  bool operator==(const SignPattern&) const = default;

 private:
  IndexSet support_;
  std::vector<int> signs_;
};

inline constexpr double kDefaultPivotTol = 1e-10;

RealVector mat_vec(const DenseMatrix& a, std::span<const double> x);

/// m x |S| matrix of A's columns listed in S.
DenseMatrix columns(const DenseMatrix& a, const IndexSet& s);

/// Numerical rank via row elimination with partial pivoting. A pivot counts
/// when its magnitude exceeds pivot_tol times the largest initial entry
/// magnitude (or 1 when A is all zero).
std::size_t rank(const DenseMatrix& a, double pivot_tol = kDefaultPivotTol);

/// Solves the square system B z = f with partial pivoting. Returns false
/// when a pivot falls below pivot_tol times the largest entry of B.
bool solve_square(const DenseMatrix& b, std::span<const double> f,
                  std::span<double> z, double pivot_tol = kDefaultPivotTol);

double max_abs(std::span<const double> x) noexcept;
double max_abs_diff(std::span<const double> x, std::span<const double> y);

}  // namespace modcs
