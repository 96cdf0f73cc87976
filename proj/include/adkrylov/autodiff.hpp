#pragma once

/// \file autodiff.hpp
/// \brief Forward-mode derivatives of x(u) = A(u)^{-1} b(u), two ways.
///
/// Low-level: run the solver once on dual numbers (A + dA eps, b + db eps).
/// The tangent part of the iterate is the derivative of the solver's own
/// arithmetic.
///
/// High-level: treat the solve as one operation. Differentiating A x = b gives
/// A dx = db - dA x, so solve for x first and then solve the tangent system
/// with the same matrix, solver and preconditioner.

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <span>
#include <string>
#include <string_view>
#include <utility>

#include "adkrylov/dense.hpp"
#include "adkrylov/hash.hpp"
#include "adkrylov/scalar.hpp"
#include "adkrylov/solvers.hpp"
#include "adkrylov/sparse.hpp"

namespace adkrylov {

// ---------------------------------------------------------------------------
// Deterministic sampling.

/// Per-problem seed from a base seed and the matrix name.
constexpr std::uint64_t problem_seed(std::uint64_t base, std::string_view name) {
  return mix64(base ^ fnv1a(name));
}

/// Uniform doubles in [0, 1) from mt19937_64, 53 random bits each. The
/// conversion is spelled out so results do not depend on the standard
/// library's distribution implementation.
class UniformSampler {
 public:
  explicit UniformSampler(std::uint64_t seed) : engine_(seed) {}
  double operator()() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

 private:
  std::mt19937_64 engine_;
};

// ---------------------------------------------------------------------------

/// A manufactured instance: references first, right-hand sides derived.
struct TangentProblem {
  std::string name;
  CsrMatrix<double> a;
  std::optional<CsrMatrix<double>> da;
  DenseVector<double> b;
  DenseVector<double> db;
  DenseVector<double> x_ref;
  DenseVector<double> dx_ref;
  std::uint64_t seed = 0;

  std::size_t size() const { return a.rows(); }
};

/// b = A x_ref, db = dA x_ref + A dx_ref, with caller-chosen references.
inline TangentProblem manufacture_problem(CsrMatrix<double> a, std::optional<CsrMatrix<double>> da,
                                          DenseVector<double> x_ref, DenseVector<double> dx_ref) {
  if (!a.square()) throw DimensionError("manufacture_problem: matrix not square");
  const std::size_t n = a.rows();
  if (x_ref.size() != n || dx_ref.size() != n)
    throw DimensionError("manufacture_problem: reference length mismatch");
  if (da && (da->rows() != n || da->cols() != n))
    throw DimensionError("manufacture_problem: dA shape differs from A");
  TangentProblem p;
  p.b = spmv(a, x_ref);
  p.db = spmv(a, dx_ref);
  if (da) {
    const auto dax = spmv(*da, x_ref);
    for (std::size_t i = 0; i < n; ++i) p.db[i] = dax[i] + p.db[i];
  }
  p.a = std::move(a);
  p.da = std::move(da);
  p.x_ref = std::move(x_ref);
  p.dx_ref = std::move(dx_ref);
  return p;
}

/// Draws x_ref then dx_ref i.i.d. uniform on [0, 1) from `seed`.
inline TangentProblem manufacture_problem(CsrMatrix<double> a, std::optional<CsrMatrix<double>> da,
                                          std::uint64_t seed) {
  const std::size_t n = a.rows();
  UniformSampler draw(seed);
  DenseVector<double> x_ref(n), dx_ref(n);
  for (auto& v : x_ref) v = draw();
  for (auto& v : dx_ref) v = draw();
  auto p = manufacture_problem(std::move(a), std::move(da), std::move(x_ref), std::move(dx_ref));
  p.seed = seed;
  return p;
}

// ---------------------------------------------------------------------------

struct LowLevelResult {
  DenseVector<double> x;
  DenseVector<double> dx;
  SolveOutcome<Dual> outcome;
};

struct HighLevelResult {
  DenseVector<double> x;
  DenseVector<double> dx;
  SolveOutcome<double> outcome_x;
  SolveOutcome<double> outcome_dx;
};

/// Runs the configured solver once on dual scalars, x0 = 0.
template <class P = IdentityPreconditioner>
  requires PreconditionerFor<P, Dual>
LowLevelResult solve_lowlevel(const TangentProblem& p, const SolverConfig& cfg,
                              const IterationObserver<Dual>& obs = {}, const P& precond = {}) {
  const auto b = lift(std::span<const double>(p.b), std::span<const double>(p.db));
  const DenseVector<Dual> x0(p.size(), Dual{});
  SolveOutcome<Dual> outcome =
      p.da ? solve<Dual>(lift(p.a, p.da), std::span<const Dual>(b), std::span<const Dual>(x0), cfg,
                         obs, precond)
           : solve<Dual>(p.a, std::span<const Dual>(b), std::span<const Dual>(x0), cfg, obs,
                         precond);
  LowLevelResult r;
  r.x = primal_part(std::span<const Dual>(outcome.x));
  r.dx = tangent_part(std::span<const Dual>(outcome.x));
  r.outcome = std::move(outcome);
  return r;
}

/// Right-hand side of the tangent system, db - dA x.
inline DenseVector<double> tangent_rhs(const TangentProblem& p, std::span<const double> x) {
  DenseVector<double> rhs(p.db);
  if (p.da) {
    DenseVector<double> dax(p.size());
    spmv(*p.da, x, std::span<double>(dax));
    for (std::size_t i = 0; i < rhs.size(); ++i) rhs[i] -= dax[i];
  }
  return rhs;
}

/// Solves A x = b, then A y = db - dA x with the same solver, configuration
/// and preconditioner object; dx = y. Both solves start from zero.
template <class P = IdentityPreconditioner>
  requires PreconditionerFor<P, double>
HighLevelResult solve_highlevel(const TangentProblem& p, const SolverConfig& cfg,
                                const IterationObserver<double>& obs_x = {},
                                const IterationObserver<double>& obs_dx = {},
                                const P& precond = {}) {
  const DenseVector<double> x0(p.size(), 0.0);
  HighLevelResult r;
  r.outcome_x = solve<double>(p.a, std::span<const double>(p.b), std::span<const double>(x0), cfg,
                              obs_x, precond);
  r.x = r.outcome_x.x;
  const auto rhs = tangent_rhs(p, std::span<const double>(r.x));
  r.outcome_dx = solve<double>(p.a, std::span<const double>(rhs), std::span<const double>(x0), cfg,
                               obs_dx, precond);
  r.dx = r.outcome_dx.x;
  return r;
}

using MatrixFamily = std::function<CsrMatrix<double>(double)>;
using VectorFamily = std::function<DenseVector<double>(double)>;

/// Central difference (x(u0 + h) - x(u0 - h)) / 2h with x(u) from the dense
/// LU oracle.
inline DenseVector<double> finite_difference_reference(const MatrixFamily& a_of_u,
                                                       const VectorFamily& b_of_u, double u0,
                                                       double h) {
  const auto xp = dense_solve_oracle(a_of_u(u0 + h), b_of_u(u0 + h));
  const auto xm = dense_solve_oracle(a_of_u(u0 - h), b_of_u(u0 - h));
  DenseVector<double> d(xp.size());
  for (std::size_t i = 0; i < d.size(); ++i) d[i] = (xp[i] - xm[i]) / (2.0 * h);
  return d;
}

}  // namespace adkrylov
