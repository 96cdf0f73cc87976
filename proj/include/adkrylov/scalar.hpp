#pragma once

/// \file scalar.hpp
/// \brief Scalar contract for the Krylov solvers and the forward-mode dual number.
///
/// Every solver in this library is written once against `KrylovScalar`.
/// Instantiating a solver with `double` gives the ordinary solver; instantiating
/// it with `Dual` propagates a single directional derivative through the exact
/// arithmetic sequence of that solver (low-level differentiation).
///
/// All comparisons and all control-flow decisions look at the primal part only,
/// so a dual run follows the same branches as the plain run.

#include <cmath>
#include <compare>
#include <concepts>
#include <limits>
#include <ostream>
#include <stdexcept>

namespace adkrylov {

/// Value plus one tangent component.
struct Dual {
  double value = 0.0;
  double tangent = 0.0;

  constexpr Dual() = default;
  // Real literals lift to constants (zero tangent).
  constexpr Dual(double v) : value(v) {}  // NOLINT(google-explicit-constructor)
  constexpr Dual(double v, double t) : value(v), tangent(t) {}

  /// Independent variable seeded with unit tangent.
  static constexpr Dual variable(double v) { return {v, 1.0}; }

  constexpr Dual& operator+=(const Dual& o) {
    value += o.value;
    tangent += o.tangent;
    return *this;
  }
  constexpr Dual& operator-=(const Dual& o) {
    value -= o.value;
    tangent -= o.tangent;
    return *this;
  }
  constexpr Dual& operator*=(const Dual& o) {
    tangent = tangent * o.value + value * o.tangent;
    value *= o.value;
    return *this;
  }
  constexpr Dual& operator/=(const Dual& o) { return *this = *this / o; }
  friend constexpr Dual operator/(const Dual& a, const Dual& b);
};

constexpr Dual operator-(const Dual& a) { return {-a.value, -a.tangent}; }
constexpr Dual operator+(Dual a, const Dual& b) { return a += b; }
constexpr Dual operator-(Dual a, const Dual& b) { return a -= b; }

/// Product rule.
constexpr Dual operator*(const Dual& a, const Dual& b) {
  return {a.value * b.value, a.tangent * b.value + a.value * b.tangent};
}

/// Quotient rule, written as (a' - q b') / b so that tiny divisors do not
/// underflow b*b. A zero primal divisor yields non-finite parts.
constexpr Dual operator/(const Dual& a, const Dual& b) {
  const double q = a.value / b.value;
  return {q, (a.tangent - q * b.tangent) / b.value};
}

// Mixed arithmetic with plain reals keeps the primal bit pattern of the
// all-real expression.
constexpr Dual operator+(const Dual& a, double b) { return {a.value + b, a.tangent}; }
constexpr Dual operator+(double a, const Dual& b) { return {a + b.value, b.tangent}; }
constexpr Dual operator-(const Dual& a, double b) { return {a.value - b, a.tangent}; }
constexpr Dual operator-(double a, const Dual& b) { return {a - b.value, -b.tangent}; }
constexpr Dual operator*(const Dual& a, double b) { return {a.value * b, a.tangent * b}; }
constexpr Dual operator*(double a, const Dual& b) { return {a * b.value, a * b.tangent}; }
constexpr Dual operator/(const Dual& a, double b) { return {a.value / b, a.tangent / b}; }
constexpr Dual operator/(double a, const Dual& b) { return Dual{a} / b; }

// Primal-only ordering; tangents never take part in a comparison.
constexpr bool operator==(const Dual& a, const Dual& b) { return a.value == b.value; }
constexpr std::partial_ordering operator<=>(const Dual& a, const Dual& b) {
  return a.value <=> b.value;
}
constexpr bool operator==(const Dual& a, double b) { return a.value == b; }
constexpr std::partial_ordering operator<=>(const Dual& a, double b) { return a.value <=> b; }

/// Square root. The tangent at a zero primal is zero for a zero tangent and
/// non-finite otherwise; a negative primal is a domain error.
inline Dual sqrt(const Dual& a) {
  if (a.value < 0.0) throw std::domain_error("adkrylov::sqrt: negative primal argument");
  const double root = std::sqrt(a.value);
  if (a.tangent == 0.0) return {root, 0.0};
  return {root, a.tangent / (2.0 * root)};
}

/// Absolute value with sign(0) = 0, so the tangent at the kink is zero.
inline Dual abs(const Dual& a) {
  const double sign = a.value > 0.0 ? 1.0 : (a.value < 0.0 ? -1.0 : 0.0);
  return {std::abs(a.value), a.tangent * sign};
}

inline std::ostream& operator<<(std::ostream& os, const Dual& a) {
  return os << '(' << a.value << ", " << a.tangent << ')';
}

// ---------------------------------------------------------------------------
// Scalar contract helpers. Overloaded for double and Dual; found by ADL or by
// qualified call from generic code.

constexpr double primal(double a) { return a; }
constexpr double primal(const Dual& a) { return a.value; }

constexpr double tangent(double) { return 0.0; }
constexpr double tangent(const Dual& a) { return a.tangent; }

/// True when every component is finite.
inline bool is_finite(double a) { return std::isfinite(a); }
inline bool is_finite(const Dual& a) { return std::isfinite(a.value) && std::isfinite(a.tangent); }

/// Finiteness of the primal part only. This is the test solvers poll, so the
/// tangent can never change a solver's control flow.
inline bool primal_finite(double a) { return std::isfinite(a); }
inline bool primal_finite(const Dual& a) { return std::isfinite(a.value); }

class ComparisonError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Orders two scalars by their primal parts. Unordered (NaN) primals throw.
template <class T>
std::partial_ordering primal_cmp(const T& a, const T& b) {
  const auto ord = primal(a) <=> primal(b);
  if (ord == std::partial_ordering::unordered)
    throw ComparisonError("primal_cmp: unordered (NaN) primal value");
  return ord;
}

namespace detail {
// Brings the std overloads into scope for double so that unqualified sqrt/abs
// in generic code resolve for both scalar kinds.
inline double sqrt(double a) { return std::sqrt(a); }
inline double abs(double a) { return std::abs(a); }
}  // namespace detail

using detail::abs;
using detail::sqrt;

/// The operations every solver scalar must provide.
template <class T>
concept KrylovScalar = std::regular<T> && requires(T a, T b, double r) {
  { T(r) };
  { a + b } -> std::convertible_to<T>;
  { a - b } -> std::convertible_to<T>;
  { a * b } -> std::convertible_to<T>;
  { a / b } -> std::convertible_to<T>;
  { -a } -> std::convertible_to<T>;
  { sqrt(a) } -> std::convertible_to<T>;
  { abs(a) } -> std::convertible_to<T>;
  { primal(a) } -> std::convertible_to<double>;
  { primal_finite(a) } -> std::convertible_to<bool>;
  { is_finite(a) } -> std::convertible_to<bool>;
};

static_assert(KrylovScalar<double>);
static_assert(KrylovScalar<Dual>);

}  // namespace adkrylov
