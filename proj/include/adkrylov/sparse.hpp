#pragma once

/// \file sparse.hpp
/// \brief Compressed sparse row storage and the vector kernels used by the solvers.

#include <algorithm>
#include <cstddef>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "adkrylov/scalar.hpp"

namespace adkrylov {

template <class T>
using DenseVector = std::vector<T>;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// One (row, col, value) entry, 0-based.
template <class T>
struct Triplet {
  std::size_t row;
  std::size_t col;
  T value;
};

/// Square or rectangular CSR matrix. Immutable once built; rows are sorted and
/// free of duplicate columns.
template <class T>
class CsrMatrix {
 public:
  CsrMatrix() : row_ptr_{0} {}

  CsrMatrix(std::size_t nrows, std::size_t ncols, std::vector<std::size_t> row_ptr,
            std::vector<std::size_t> col_idx, std::vector<T> values)
      : nrows_(nrows),
        ncols_(ncols),
        row_ptr_(std::move(row_ptr)),
        col_idx_(std::move(col_idx)),
        values_(std::move(values)) {
    validate();
  }

  /// Builds from unordered triplets; duplicate (i, j) entries are summed in
  /// input order.
  static CsrMatrix from_triplets(std::size_t nrows, std::size_t ncols,
                                 std::vector<Triplet<T>> entries) {
    for (const auto& e : entries)
      if (e.row >= nrows || e.col >= ncols)
        throw DimensionError("triplet index out of range");
    std::stable_sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) {
      return a.row != b.row ? a.row < b.row : a.col < b.col;
    });
    std::vector<std::size_t> row_ptr(nrows + 1, 0);
    std::vector<std::size_t> col_idx;
    std::vector<T> values;
    col_idx.reserve(entries.size());
    values.reserve(entries.size());
    for (std::size_t k = 0; k < entries.size(); ++k) {
      const auto& e = entries[k];
      if (k > 0 && entries[k - 1].row == e.row && entries[k - 1].col == e.col) {
        values.back() += e.value;
        continue;
      }
      col_idx.push_back(e.col);
      values.push_back(e.value);
      ++row_ptr[e.row + 1];
    }
    for (std::size_t i = 0; i < nrows; ++i) row_ptr[i + 1] += row_ptr[i];
    return CsrMatrix(nrows, ncols, std::move(row_ptr), std::move(col_idx), std::move(values));
  }

  static CsrMatrix identity(std::size_t n) {
    std::vector<std::size_t> row_ptr(n + 1), col_idx(n);
    for (std::size_t i = 0; i <= n; ++i) row_ptr[i] = i;
    for (std::size_t i = 0; i < n; ++i) col_idx[i] = i;
    return CsrMatrix(n, n, std::move(row_ptr), std::move(col_idx), std::vector<T>(n, T(1.0)));
  }

  static CsrMatrix diagonal(std::span<const T> diag) {
    const std::size_t n = diag.size();
    std::vector<std::size_t> row_ptr(n + 1), col_idx(n);
    for (std::size_t i = 0; i <= n; ++i) row_ptr[i] = i;
    for (std::size_t i = 0; i < n; ++i) col_idx[i] = i;
    return CsrMatrix(n, n, std::move(row_ptr), std::move(col_idx),
                     std::vector<T>(diag.begin(), diag.end()));
  }

  std::size_t rows() const { return nrows_; }
  std::size_t cols() const { return ncols_; }
  std::size_t nonzeros() const { return values_.size(); }
  bool square() const { return nrows_ == ncols_; }

  const std::vector<std::size_t>& row_ptr() const { return row_ptr_; }
  const std::vector<std::size_t>& col_idx() const { return col_idx_; }
  const std::vector<T>& values() const { return values_; }

  /// Entry (i, j), zero when not stored.
  T at(std::size_t i, std::size_t j) const {
    const auto first = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i]);
    const auto last = col_idx_.begin() + static_cast<std::ptrdiff_t>(row_ptr_[i + 1]);
    const auto it = std::lower_bound(first, last, j);
    if (it == last || *it != j) return T(0.0);
    return values_[static_cast<std::size_t>(it - col_idx_.begin())];
  }

  std::vector<Triplet<T>> triplets() const {
    std::vector<Triplet<T>> out;
    out.reserve(values_.size());
    for (std::size_t i = 0; i < nrows_; ++i)
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k)
        out.push_back({i, col_idx_[k], values_[k]});
    return out;
  }

  friend bool operator==(const CsrMatrix&, const CsrMatrix&) = default;

 private:
  void validate() const {
    if (row_ptr_.size() != nrows_ + 1) throw DimensionError("row_ptr length must be nrows + 1");
    if (row_ptr_.front() != 0) throw DimensionError("row_ptr[0] must be 0");
    if (row_ptr_.back() != values_.size() || col_idx_.size() != values_.size())
      throw DimensionError("row_ptr[nrows] must equal the number of stored values");
    for (std::size_t i = 0; i < nrows_; ++i) {
      if (row_ptr_[i] > row_ptr_[i + 1]) throw DimensionError("row_ptr must be nondecreasing");
      for (std::size_t k = row_ptr_[i]; k < row_ptr_[i + 1]; ++k) {
        if (col_idx_[k] >= ncols_) throw DimensionError("column index out of range");
        if (k > row_ptr_[i] && col_idx_[k] <= col_idx_[k - 1])
          throw DimensionError("column indices must be strictly increasing within a row");
      }
    }
  }

  std::size_t nrows_ = 0;
  std::size_t ncols_ = 0;
  std::vector<std::size_t> row_ptr_;
  std::vector<std::size_t> col_idx_;
  std::vector<T> values_;
};

/// y = A x, accumulated left to right within each row.
template <class T, class S>
void spmv(const CsrMatrix<T>& a, std::span<const S> x, std::span<S> y) {
  if (a.cols() != x.size() || a.rows() != y.size())
    throw DimensionError("spmv: dimension mismatch (" + std::to_string(a.rows()) + "x" +
                         std::to_string(a.cols()) + " times " + std::to_string(x.size()) + ")");
  const auto& rp = a.row_ptr();
  const auto& ci = a.col_idx();
  const auto& va = a.values();
  for (std::size_t i = 0; i < a.rows(); ++i) {
    S sum(0.0);
    for (std::size_t k = rp[i]; k < rp[i + 1]; ++k) sum += va[k] * x[ci[k]];
    y[i] = sum;
  }
}

template <class T, class S>
DenseVector<S> spmv(const CsrMatrix<T>& a, const DenseVector<S>& x) {
  DenseVector<S> y(a.rows());
  spmv(a, std::span<const S>(x), std::span<S>(y));
  return y;
}

/// Converts the value type entrywise, keeping the pattern.
template <class To, class From, class F>
CsrMatrix<To> map_values(const CsrMatrix<From>& a, F&& f) {
  std::vector<To> vals;
  vals.reserve(a.nonzeros());
  for (const auto& v : a.values()) vals.push_back(f(v));
  return CsrMatrix<To>(a.rows(), a.cols(), a.row_ptr(), a.col_idx(), std::move(vals));
}

/// Pairs A with its derivative dA as a dual-valued matrix. The result's pattern
/// is the union of both patterns; an absent dA gives zero tangents.
inline CsrMatrix<Dual> lift(const CsrMatrix<double>& a,
                            const std::optional<CsrMatrix<double>>& da = std::nullopt) {
  if (!da) return map_values<Dual>(a, [](double v) { return Dual{v, 0.0}; });
  if (da->rows() != a.rows() || da->cols() != a.cols())
    throw DimensionError("lift: dA shape differs from A");
  std::vector<Triplet<Dual>> entries;
  entries.reserve(a.nonzeros() + da->nonzeros());
  for (const auto& t : a.triplets()) entries.push_back({t.row, t.col, Dual{t.value, 0.0}});
  for (const auto& t : da->triplets()) entries.push_back({t.row, t.col, Dual{0.0, t.value}});
  return CsrMatrix<Dual>::from_triplets(a.rows(), a.cols(), std::move(entries));
}

inline DenseVector<Dual> lift(std::span<const double> v, std::span<const double> dv) {
  if (v.size() != dv.size()) throw DimensionError("lift: vector lengths differ");
  DenseVector<Dual> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = Dual{v[i], dv[i]};
  return out;
}

template <class T>
DenseVector<double> primal_part(std::span<const T> v) {
  DenseVector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = primal(v[i]);
  return out;
}

template <class T>
DenseVector<double> tangent_part(std::span<const T> v) {
  DenseVector<double> out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) out[i] = tangent(v[i]);
  return out;
}

// ---------------------------------------------------------------------------
// BLAS-1 style kernels, fixed summation order.

template <class T>
T dot(std::span<const T> x, std::span<const T> y) {
  T sum(0.0);
  for (std::size_t i = 0; i < x.size(); ++i) sum += x[i] * y[i];
  return sum;
}

template <class T>
T norm2(std::span<const T> x) {
  using adkrylov::sqrt;
  return sqrt(dot(x, x));
}

/// y += alpha x
template <class T>
void axpy(const T& alpha, std::span<const T> x, std::span<T> y) {
  for (std::size_t i = 0; i < x.size(); ++i) y[i] += alpha * x[i];
}

/// Euclidean distance between two plain vectors.
inline double distance2(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw DimensionError("distance2: length mismatch");
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = x[i] - y[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

}  // namespace adkrylov
