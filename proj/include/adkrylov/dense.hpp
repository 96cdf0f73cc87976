#pragma once

/// \file dense.hpp
/// \brief Dense reference computations: LU solve and 2-norm condition number.
///
/// These exist to check the iterative solvers, not to compete with them.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "adkrylov/sparse.hpp"

namespace adkrylov {

class SingularMatrixError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SizeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr std::size_t kDenseSolveMaxDim = 2000;
inline constexpr std::size_t kConditionMaxDim = 1000;

/// Row-major dense copy.
inline std::vector<double> densify(const CsrMatrix<double>& a) {
  std::vector<double> d(a.rows() * a.cols(), 0.0);
  for (const auto& t : a.triplets()) d[t.row * a.cols() + t.col] = t.value;
  return d;
}

/// Solves A x = b by LU with partial pivoting.
inline DenseVector<double> dense_solve_oracle(const CsrMatrix<double>& a,
                                              std::span<const double> b) {
  const std::size_t n = a.rows();
  if (!a.square()) throw DimensionError("dense_solve_oracle: matrix not square");
  if (b.size() != n) throw DimensionError("dense_solve_oracle: rhs length mismatch");
  if (n > kDenseSolveMaxDim)
    throw SizeError("dense_solve_oracle: n = " + std::to_string(n) + " exceeds " +
                    std::to_string(kDenseSolveMaxDim));

  std::vector<double> lu = densify(a);
  std::vector<double> x(b.begin(), b.end());
  double scale = 0.0;
  for (double v : lu) scale = std::max(scale, std::abs(v));
  const double tiny = static_cast<double>(n) * std::numeric_limits<double>::epsilon() * scale;

  for (std::size_t k = 0; k < n; ++k) {
    std::size_t piv = k;
    for (std::size_t i = k + 1; i < n; ++i)
      if (std::abs(lu[i * n + k]) > std::abs(lu[piv * n + k])) piv = i;
    if (!(std::abs(lu[piv * n + k]) > tiny))
      throw SingularMatrixError("dense_solve_oracle: matrix is singular to working precision");
    if (piv != k) {
      for (std::size_t j = 0; j < n; ++j) std::swap(lu[k * n + j], lu[piv * n + j]);
      std::swap(x[k], x[piv]);
    }
    const double pivot = lu[k * n + k];
    for (std::size_t i = k + 1; i < n; ++i) {
      const double l = lu[i * n + k] / pivot;
      if (l == 0.0) continue;
      for (std::size_t j = k + 1; j < n; ++j) lu[i * n + j] -= l * lu[k * n + j];
      x[i] -= l * x[k];
    }
  }
  for (std::size_t k = n; k-- > 0;) {
    double s = x[k];
    for (std::size_t j = k + 1; j < n; ++j) s -= lu[k * n + j] * x[j];
    x[k] = s / lu[k * n + k];
  }
  return x;
}

/// sigma_max / sigma_min of the densified matrix. Refuses n > 1000.
inline double condition_number(const CsrMatrix<double>& a) {
  if (!a.square()) throw DimensionError("condition_number: matrix not square");
  if (a.rows() > kConditionMaxDim)
    throw SizeError("condition_number: n = " + std::to_string(a.rows()) + " exceeds " +
                    std::to_string(kConditionMaxDim));
  const auto n = static_cast<Eigen::Index>(a.rows());
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(n, n);
  for (const auto& t : a.triplets())
    d(static_cast<Eigen::Index>(t.row), static_cast<Eigen::Index>(t.col)) = t.value;
  if (n == 0) return 1.0;
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(d);
  const auto& s = svd.singularValues();
  const double smin = s(n - 1);
  if (smin == 0.0) return std::numeric_limits<double>::infinity();
  return s(0) / smin;
}

}  // namespace adkrylov
