#include "modcs/numkit.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "modcs/errors.hpp"

namespace modcs {

namespace {

void require_finite(std::span<const double> values) {
  for (double v : values) {
    if (!std::isfinite(v)) throw InvalidArgument("matrix entry is not finite");
  }
}

}  // namespace

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols)
    : rows_(rows), cols_(cols), data_(rows * cols, 0.0) {}

DenseMatrix::DenseMatrix(std::size_t rows, std::size_t cols,
                         std::vector<double> entries)
    : rows_(rows), cols_(cols), data_(std::move(entries)) {
  if (data_.size() != rows * cols) {
    throw DimensionMismatch("matrix entry count does not match its shape");
  }
  require_finite(data_);
}

DenseMatrix::DenseMatrix(
    std::initializer_list<std::initializer_list<double>> rows) {
  rows_ = rows.size();
  cols_ = rows_ == 0 ? 0 : rows.begin()->size();
  data_.reserve(rows_ * cols_);
  for (const auto& r : rows) {
    if (r.size() != cols_) throw DimensionMismatch("ragged matrix literal");
    data_.insert(data_.end(), r.begin(), r.end());
  }
  require_finite(data_);
}

DenseMatrix DenseMatrix::identity(std::size_t n) {
  DenseMatrix id(n, n);
  for (std::size_t i = 0; i < n; ++i) id(i, i) = 1.0;
  return id;
}

IndexSet::IndexSet(std::size_t universe, std::vector<std::size_t> members)
    : universe_(universe), members_(std::move(members)) {
  std::sort(members_.begin(), members_.end());
  if (std::adjacent_find(members_.begin(), members_.end()) != members_.end()) {
    throw InvalidArgument("index set has duplicate members");
  }
  if (!members_.empty() && members_.back() >= universe_) {
    throw InvalidArgument("index " + std::to_string(members_.back()) +
                          " outside universe of size " +
                          std::to_string(universe_));
  }
}

IndexSet IndexSet::full(std::size_t universe) {
  IndexSet s(universe);
  s.members_.resize(universe);
  for (std::size_t k = 0; k < universe; ++k) s.members_[k] = k;
  return s;
}

bool IndexSet::contains(std::size_t k) const noexcept {
  return std::binary_search(members_.begin(), members_.end(), k);
}

std::size_t IndexSet::position(std::size_t k) const noexcept {
  auto it = std::lower_bound(members_.begin(), members_.end(), k);
  if (it == members_.end() || *it != k) return members_.size();
  return static_cast<std::size_t>(it - members_.begin());
}

bool IndexSet::is_subset_of(const IndexSet& other) const {
  return std::includes(other.members_.begin(), other.members_.end(),
                       members_.begin(), members_.end());
}

IndexSet IndexSet::complement() const {
  IndexSet out(universe_);
  out.members_.reserve(universe_ - members_.size());
  std::size_t next = 0;
  for (std::size_t k = 0; k < universe_; ++k) {
    if (next < members_.size() && members_[next] == k) {
      ++next;
    } else {
      out.members_.push_back(k);
    }
  }
  return out;
}

IndexSet IndexSet::set_union(const IndexSet& other) const {
  if (other.universe_ != universe_) throw DimensionMismatch("universe mismatch");
  IndexSet out(universe_);
  std::set_union(members_.begin(), members_.end(), other.members_.begin(),
                 other.members_.end(), std::back_inserter(out.members_));
  return out;
}

IndexSet IndexSet::set_difference(const IndexSet& other) const {
  if (other.universe_ != universe_) throw DimensionMismatch("universe mismatch");
  IndexSet out(universe_);
  std::set_difference(members_.begin(), members_.end(), other.members_.begin(),
                      other.members_.end(), std::back_inserter(out.members_));
  return out;
}

IndexSet IndexSet::set_intersection(const IndexSet& other) const {
  if (other.universe_ != universe_) throw DimensionMismatch("universe mismatch");
  IndexSet out(universe_);
  std::set_intersection(members_.begin(), members_.end(),
                        other.members_.begin(), other.members_.end(),
                        std::back_inserter(out.members_));
  return out;
}

IndexSet IndexSet::subset_from_mask(std::uint64_t mask) const {
  IndexSet out(universe_);
  for (std::size_t i = 0; i < members_.size(); ++i) {
    if ((mask >> i) & 1U) out.members_.push_back(members_[i]);
  }
  return out;
}

std::string to_string(const IndexSet& s) {
  std::ostringstream os;
  os << '{';
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (i) os << ',';
    os << s[i];
  }
  os << '}';
  return os.str();
}

SignPattern::SignPattern(IndexSet support)
    : support_(std::move(support)), signs_(support_.size(), 1) {}

SignPattern::SignPattern(IndexSet support, std::vector<int> signs)
    : support_(std::move(support)), signs_(std::move(signs)) {
  if (signs_.size() != support_.size()) {
    throw DimensionMismatch("sign count does not match support size");
  }
  for (int s : signs_) {
    if (s != 1 && s != -1) throw InvalidArgument("signs must be +1 or -1");
  }
}

int SignPattern::sign_of(std::size_t k) const {
  std::size_t pos = support_.position(k);
  if (pos == support_.size()) {
    throw InvalidArgument("coordinate " + std::to_string(k) +
                          " is not in the sign pattern's support");
  }
  return signs_[pos];
}

RealVector mat_vec(const DenseMatrix& a, std::span<const double> x) {
  if (x.size() != a.cols()) {
    throw DimensionMismatch("mat_vec: vector length " +
                            std::to_string(x.size()) + " != matrix cols " +
                            std::to_string(a.cols()));
  }
  RealVector out(a.rows(), 0.0);
  for (std::size_t i = 0; i < a.rows(); ++i) {
    auto r = a.row(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < r.size(); ++j) acc += r[j] * x[j];
    out[i] = acc;
  }
  return out;
}

DenseMatrix columns(const DenseMatrix& a, const IndexSet& s) {
  if (s.universe() != a.cols()) {
    throw DimensionMismatch("columns: index universe does not match cols");
  }
  DenseMatrix out(a.rows(), s.size());
  for (std::size_t i = 0; i < a.rows(); ++i) {
    for (std::size_t j = 0; j < s.size(); ++j) out(i, j) = a(i, s[j]);
  }
  return out;
}

std::size_t rank(const DenseMatrix& a, double pivot_tol) {
  if (!(pivot_tol > 0)) throw InvalidArgument("pivot_tol must be positive");
  const std::size_t m = a.rows();
  const std::size_t n = a.cols();
  if (m == 0 || n == 0) return 0;

  std::vector<double> w(a.data().begin(), a.data().end());
  double scale = max_abs(w);
  if (scale == 0.0) scale = 1.0;
  const double threshold = pivot_tol * scale;

  std::size_t r = 0;
  for (std::size_t col = 0; col < n && r < m; ++col) {
    std::size_t best = r;
    double best_abs = std::abs(w[r * n + col]);
    for (std::size_t i = r + 1; i < m; ++i) {
      double v = std::abs(w[i * n + col]);
      if (v > best_abs) {
        best_abs = v;
        best = i;
      }
    }
    if (best_abs <= threshold) continue;
    if (best != r) {
      std::swap_ranges(w.begin() + best * n, w.begin() + (best + 1) * n,
                       w.begin() + r * n);
    }
    const double piv = w[r * n + col];
    for (std::size_t i = r + 1; i < m; ++i) {
      const double f = w[i * n + col] / piv;
      if (f == 0.0) continue;
      for (std::size_t j = col; j < n; ++j) w[i * n + j] -= f * w[r * n + j];
    }
    ++r;
  }
  return r;
}

bool solve_square(const DenseMatrix& b, std::span<const double> f,
                  std::span<double> z, double pivot_tol) {
  const std::size_t n = b.rows();
  if (b.cols() != n || f.size() != n || z.size() != n) {
    throw DimensionMismatch("solve_square: shape mismatch");
  }
  if (n == 0) return true;
  const std::size_t w_cols = n + 1;
  std::vector<double> w(n * w_cols);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) w[i * w_cols + j] = b(i, j);
    w[i * w_cols + n] = f[i];
  }
  double scale = max_abs(b.data());
  if (scale == 0.0) return false;
  const double threshold = pivot_tol * scale;

  for (std::size_t col = 0; col < n; ++col) {
    std::size_t best = col;
    double best_abs = std::abs(w[col * w_cols + col]);
    for (std::size_t i = col + 1; i < n; ++i) {
      double v = std::abs(w[i * w_cols + col]);
      if (v > best_abs) {
        best_abs = v;
        best = i;
      }
    }
    if (best_abs <= threshold) return false;
    if (best != col) {
      std::swap_ranges(w.begin() + best * w_cols,
                       w.begin() + (best + 1) * w_cols,
                       w.begin() + col * w_cols);
    }
    const double piv = w[col * w_cols + col];
    for (std::size_t i = col + 1; i < n; ++i) {
      const double factor = w[i * w_cols + col] / piv;
      if (factor == 0.0) continue;
      for (std::size_t j = col; j < w_cols; ++j) {
        w[i * w_cols + j] -= factor * w[col * w_cols + j];
      }
    }
  }
  for (std::size_t ii = n; ii-- > 0;) {
    double acc = w[ii * w_cols + n];
    for (std::size_t j = ii + 1; j < n; ++j) acc -= w[ii * w_cols + j] * z[j];
    z[ii] = acc / w[ii * w_cols + ii];
  }
  return true;
}

double max_abs(std::span<const double> x) noexcept {
  double m = 0.0;
  for (double v : x) m = std::max(m, std::abs(v));
  return m;
}

double max_abs_diff(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionMismatch("length mismatch");
  double m = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    m = std::max(m, std::abs(x[i] - y[i]));
  }
  return m;
}

}  // namespace modcs
