#pragma once

/// \file solvers.hpp
/// \brief Restarted GMRES, BiCGStab and TFQMR over a generic scalar.
///
/// Each solver is written once against `KrylovScalar` so the same code runs on
/// `double` and on `Dual`. Every branch tests primal values only, which makes
/// the primal part of a dual run bit-identical to the plain run.
///
/// Iteration counting (what the observer and `max_iterations` see):
///  - GMRES(m): one Arnoldi step, i.e. one matrix-vector product. Restarts do
///    not reset the count.
///  - BiCGStab: one full step (two products).
///  - TFQMR: one half-sweep (one product).
///
/// All solvers use right preconditioning through a `Preconditioner` object;
/// the only one shipped is the identity.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "adkrylov/scalar.hpp"
#include "adkrylov/sparse.hpp"

namespace adkrylov {

enum class SolverKind { gmres, bicgstab, tfqmr };

inline constexpr std::string_view to_string(SolverKind k) {
  switch (k) {
    case SolverKind::gmres: return "gmres";
    case SolverKind::bicgstab: return "bicgstab";
    case SolverKind::tfqmr: return "tfqmr";
  }
  return "?";
}

inline SolverKind parse_solver_kind(std::string_view s) {
  if (s == "gmres" || s == "gmres_restart") return SolverKind::gmres;
  if (s == "bicgstab") return SolverKind::bicgstab;
  if (s == "tfqmr") return SolverKind::tfqmr;
  throw std::invalid_argument("unknown solver '" + std::string(s) + "'");
}

struct SolverConfig {
  SolverKind kind = SolverKind::gmres;
  std::size_t max_iterations = 2000;
  std::size_t gmres_restart = 10;
  /// Relative to ||b||. Zero runs the full iteration budget.
  double residual_tolerance = 0.0;
  std::size_t record_every = 1;

  void validate() const {
    if (max_iterations < 1) throw std::invalid_argument("max_iterations must be >= 1");
    if (gmres_restart < 1) throw std::invalid_argument("gmres_restart must be >= 1");
    if (record_every < 1) throw std::invalid_argument("record_every must be >= 1");
    if (!(residual_tolerance >= 0.0)) throw std::invalid_argument("residual_tolerance must be >= 0");
  }
};

enum class Termination { budget_exhausted, tolerance_met, breakdown };
enum class BreakdownKind { none, rho_zero, omega_zero, h_singular, nonfinite_value };

inline constexpr std::string_view to_string(BreakdownKind k) {
  switch (k) {
    case BreakdownKind::none: return "none";
    case BreakdownKind::rho_zero: return "rho_zero";
    case BreakdownKind::omega_zero: return "omega_zero";
    case BreakdownKind::h_singular: return "h_singular";
    case BreakdownKind::nonfinite_value: return "nonfinite_value";
  }
  return "?";
}

template <class T>
struct SolveOutcome {
  /// Last finite iterate.
  DenseVector<T> x;
  std::size_t iterations = 0;
  Termination termination = Termination::budget_exhausted;
  BreakdownKind breakdown = BreakdownKind::none;
  /// Iteration at which the breakdown was detected (0 when none).
  std::size_t breakdown_iteration = 0;
  /// ||b - A x||_2 of the primal parts at exit.
  double residual_norm = 0.0;
};

/// "budget_exhausted", "tolerance_met" or "breakdown:<kind>@<iteration>".
template <class T>
std::string summary(const SolveOutcome<T>& o) {
  switch (o.termination) {
    case Termination::budget_exhausted: return "budget_exhausted";
    case Termination::tolerance_met: return "tolerance_met";
    case Termination::breakdown:
      return "breakdown:" + std::string(to_string(o.breakdown)) + "@" +
             std::to_string(o.breakdown_iteration);
  }
  return "?";
}

template <class T>
struct IterationState {
  std::size_t iteration;
  std::span<const T> x;
  /// The solver's own primal residual norm (recurrence or estimate).
  double residual;
};

template <class T>
using IterationObserver = std::function<void(const IterationState<T>&)>;

struct IdentityPreconditioner {
  template <class T>
  void apply(std::span<const T> in, std::span<T> out) const {
    std::copy(in.begin(), in.end(), out.begin());
  }
};

template <class P, class T>
concept PreconditionerFor = requires(const P& p, std::span<const T> in, std::span<T> out) {
  p.apply(in, out);
};

template <class T>
DenseVector<T> apply_identity_preconditioner(const DenseVector<T>& v) {
  DenseVector<T> out(v.size());
  IdentityPreconditioner{}.apply(std::span<const T>(v), std::span<T>(out));
  return out;
}

namespace detail {

// Observer calls at every `every`-th iteration plus the last one.
template <class T>
class Recorder {
 public:
  Recorder(std::size_t every, const IterationObserver<T>& obs) : every_(every), obs_(obs) {}

  bool due(std::size_t k) const { return obs_ && k % every_ == 0; }

  void tick(std::size_t k, std::span<const T> x, double residual) {
    if (!due(k)) return;
    obs_(IterationState<T>{k, x, residual});
    last_ = k;
  }

  void finish(std::size_t k, std::span<const T> x, double residual) {
    if (!obs_ || k == 0 || last_ == k) return;
    obs_(IterationState<T>{k, x, residual});
    last_ = k;
  }

 private:
  std::size_t every_;
  const IterationObserver<T>& obs_;
  std::size_t last_ = 0;
};

template <class M, class T>
void check_system(const CsrMatrix<M>& a, std::span<const T> b, std::span<const T> x0) {
  if (!a.square()) throw DimensionError("solver: matrix must be square");
  if (b.size() != a.rows() || x0.size() != a.rows())
    throw DimensionError("solver: vector length does not match matrix dimension");
}

// Primal 2-norm of b - A x.
template <class M, class T>
double true_residual(const CsrMatrix<M>& a, std::span<const T> b, std::span<const T> x) {
  std::vector<T> ax(x.size());
  spmv(a, x, std::span<T>(ax));
  double sum = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double d = primal(b[i]) - primal(ax[i]);
    sum += d * d;
  }
  return std::sqrt(sum);
}

template <class T>
bool all_primal_finite(std::span<const T> v) {
  return std::all_of(v.begin(), v.end(), [](const T& s) { return primal_finite(s); });
}

template <class T>
double primal_abs(const T& v) {
  return std::abs(primal(v));
}

}  // namespace detail

// ---------------------------------------------------------------------------
/// GMRES(m): Arnoldi with modified Gram-Schmidt, Givens rotations on the
/// Hessenberg matrix, restart every `cfg.gmres_restart` steps. The observer sees
/// the iterate reconstructed from the current least-squares solution.
template <KrylovScalar T, class M, class P = IdentityPreconditioner>
  requires PreconditionerFor<P, T>
SolveOutcome<T> gmres(const CsrMatrix<M>& a, std::span<const T> b, std::span<const T> x0,
                      const SolverConfig& cfg, const IterationObserver<T>& obs = {},
                      const P& precond = {}) {
  cfg.validate();
  detail::check_system(a, b, x0);
  const std::size_t n = a.rows();
  const std::size_t m = cfg.gmres_restart;
  const double bnorm = primal(norm2(b));
  const double threshold = cfg.residual_tolerance * bnorm;
  constexpr double kHappy = 10.0 * std::numeric_limits<double>::epsilon();

  SolveOutcome<T> out;
  out.x.assign(x0.begin(), x0.end());
  detail::Recorder<T> rec(cfg.record_every, obs);

  std::vector<std::vector<T>> basis(m + 1, std::vector<T>(n));
  std::vector<std::vector<T>> hess(m + 1, std::vector<T>(m));  // hess[row][col]
  std::vector<T> cs(m), sn(m), g(m + 1), y(m);
  std::vector<T> w(n), z(n), xc(n), xk(n);
  std::size_t k = 0;
  double last_res = std::numeric_limits<double>::quiet_NaN();

  auto stop = [&](Termination t, BreakdownKind kind = BreakdownKind::none) {
    out.iterations = k;
    out.termination = t;
    out.breakdown = kind;
    out.breakdown_iteration = t == Termination::breakdown ? k + 1 : 0;
    out.residual_norm = detail::true_residual(a, b, std::span<const T>(out.x));
    rec.finish(k, out.x, std::isnan(last_res) ? out.residual_norm : last_res);
    return out;
  };

  // xk = xc + M^{-1} V_j y_j for the first j columns.
  auto reconstruct = [&](std::size_t j) {
    for (std::size_t i = j; i-- > 0;) {
      T s = g[i];
      for (std::size_t l = i + 1; l < j; ++l) s -= hess[i][l] * y[l];
      y[i] = s / hess[i][i];
    }
    std::fill(w.begin(), w.end(), T(0.0));
    for (std::size_t i = 0; i < j; ++i) axpy(y[i], std::span<const T>(basis[i]), std::span<T>(w));
    precond.apply(std::span<const T>(w), std::span<T>(z));
    for (std::size_t l = 0; l < n; ++l) xk[l] = xc[l] + z[l];
  };

  for (;;) {
    // Cycle start: true residual.
    spmv(a, std::span<const T>(out.x), std::span<T>(w));
    auto& v0 = basis[0];
    for (std::size_t l = 0; l < n; ++l) v0[l] = b[l] - w[l];
    const T beta = norm2(std::span<const T>(v0));
    if (!primal_finite(beta)) return stop(Termination::breakdown, BreakdownKind::nonfinite_value);
    if (primal(beta) <= threshold) {
      last_res = primal(beta);
      return stop(Termination::tolerance_met);
    }
    if (k >= cfg.max_iterations) return stop(Termination::budget_exhausted);
    for (auto& v : v0) v = v / beta;
    std::fill(g.begin(), g.end(), T(0.0));
    g[0] = beta;
    xc = out.x;

    for (std::size_t j = 0; j < m; ++j) {
      precond.apply(std::span<const T>(basis[j]), std::span<T>(z));
      spmv(a, std::span<const T>(z), std::span<T>(w));
      ++k;
      const double av_norm = primal(norm2(std::span<const T>(w)));

      for (std::size_t i = 0; i <= j; ++i) {
        hess[i][j] = dot(std::span<const T>(w), std::span<const T>(basis[i]));
        axpy(T(-hess[i][j]), std::span<const T>(basis[i]), std::span<T>(w));
      }
      const T h_next = norm2(std::span<const T>(w));
      hess[j + 1][j] = h_next;

      for (std::size_t i = 0; i < j; ++i) {
        const T tmp = cs[i] * hess[i][j] + sn[i] * hess[i + 1][j];
        hess[i + 1][j] = -sn[i] * hess[i][j] + cs[i] * hess[i + 1][j];
        hess[i][j] = tmp;
      }
      const T denom = sqrt(hess[j][j] * hess[j][j] + hess[j + 1][j] * hess[j + 1][j]);
      if (!primal_finite(denom) || !primal_finite(h_next)) {
        --k;
        return stop(Termination::breakdown, BreakdownKind::nonfinite_value);
      }
      if (primal(denom) == 0.0) {
        --k;
        return stop(Termination::breakdown, BreakdownKind::h_singular);
      }
      cs[j] = hess[j][j] / denom;
      sn[j] = hess[j + 1][j] / denom;
      hess[j][j] = denom;
      hess[j + 1][j] = T(0.0);
      g[j + 1] = -sn[j] * g[j];
      g[j] = cs[j] * g[j];
      const double res = detail::primal_abs(g[j + 1]);

      const bool happy = primal(h_next) <= kHappy * av_norm;
      if (!happy) {
        for (std::size_t l = 0; l < n; ++l) basis[j + 1][l] = w[l] / h_next;
      }
      const bool cycle_end = happy || j + 1 == m;
      const bool done = k >= cfg.max_iterations;
      const bool converged = res <= threshold;
      if (rec.due(k) || cycle_end || done || converged) {
        reconstruct(j + 1);
        if (!detail::all_primal_finite(std::span<const T>(xk))) {
          --k;
          return stop(Termination::breakdown, BreakdownKind::nonfinite_value);
        }
        out.x = xk;
        last_res = res;
        rec.tick(k, out.x, res);
      }
      if (converged && detail::true_residual(a, b, std::span<const T>(out.x)) <= threshold)
        return stop(Termination::tolerance_met);
      if (done) return stop(Termination::budget_exhausted);
      if (cycle_end) break;
    }
  }
}

// ---------------------------------------------------------------------------
/// BiCGStab (van der Vorst), shadow residual = initial residual.
template <KrylovScalar T, class M, class P = IdentityPreconditioner>
  requires PreconditionerFor<P, T>
SolveOutcome<T> bicgstab(const CsrMatrix<M>& a, std::span<const T> b, std::span<const T> x0,
                         const SolverConfig& cfg, const IterationObserver<T>& obs = {},
                         const P& precond = {}) {
  cfg.validate();
  detail::check_system(a, b, x0);
  const std::size_t n = a.rows();
  const double threshold = cfg.residual_tolerance * primal(norm2(b));

  SolveOutcome<T> out;
  out.x.assign(x0.begin(), x0.end());
  detail::Recorder<T> rec(cfg.record_every, obs);

  std::vector<T> r(n), rhat(n), p(n, T(0.0)), v(n, T(0.0)), s(n), t(n), phat(n), shat(n);
  std::vector<T> x_prev(n);
  spmv(a, std::span<const T>(out.x), std::span<T>(t));
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - t[i];
  rhat = r;

  std::size_t k = 0;
  double last_res = primal(norm2(std::span<const T>(r)));

  auto stop = [&](Termination term, BreakdownKind kind = BreakdownKind::none,
                  std::size_t at = 0) {
    out.iterations = k;
    out.termination = term;
    out.breakdown = kind;
    out.breakdown_iteration = term == Termination::breakdown ? at : 0;
    out.residual_norm = detail::true_residual(a, b, std::span<const T>(out.x));
    rec.finish(k, out.x, last_res);
    return out;
  };
  auto converged = [&] {
    return detail::true_residual(a, b, std::span<const T>(out.x)) <= threshold;
  };

  if (!std::isfinite(last_res))
    return stop(Termination::breakdown, BreakdownKind::nonfinite_value, 1);
  if (last_res <= threshold) return stop(Termination::tolerance_met);

  T rho_prev(1.0), alpha(1.0), omega(1.0);
  while (k < cfg.max_iterations) {
    const T rho = dot(std::span<const T>(rhat), std::span<const T>(r));
    if (!primal_finite(rho))
      return stop(Termination::breakdown, BreakdownKind::nonfinite_value, k + 1);
    if (primal(rho) == 0.0) return stop(Termination::breakdown, BreakdownKind::rho_zero, k + 1);
    if (k == 0) {
      p = r;
    } else {
      const T beta = (rho / rho_prev) * (alpha / omega);
      for (std::size_t i = 0; i < n; ++i) p[i] = r[i] + beta * (p[i] - omega * v[i]);
    }
    precond.apply(std::span<const T>(p), std::span<T>(phat));
    spmv(a, std::span<const T>(phat), std::span<T>(v));
    const T sigma = dot(std::span<const T>(rhat), std::span<const T>(v));
    if (!primal_finite(sigma))
      return stop(Termination::breakdown, BreakdownKind::nonfinite_value, k + 1);
    if (primal(sigma) == 0.0) return stop(Termination::breakdown, BreakdownKind::rho_zero, k + 1);
    alpha = rho / sigma;
    for (std::size_t i = 0; i < n; ++i) s[i] = r[i] - alpha * v[i];
    const double snorm = primal(norm2(std::span<const T>(s)));
    if (!std::isfinite(snorm))
      return stop(Termination::breakdown, BreakdownKind::nonfinite_value, k + 1);
    x_prev = out.x;
    ++k;

    if (snorm <= threshold) {
      // The half-step may already solve the system.
      axpy(alpha, std::span<const T>(phat), std::span<T>(out.x));
      if (converged() || snorm == 0.0) {
        last_res = snorm;
        rec.tick(k, out.x, last_res);
        if (converged()) return stop(Termination::tolerance_met);
        return stop(Termination::breakdown, BreakdownKind::omega_zero, k);
      }
      out.x = x_prev;
    }

    precond.apply(std::span<const T>(s), std::span<T>(shat));
    spmv(a, std::span<const T>(shat), std::span<T>(t));
    const T tt = dot(std::span<const T>(t), std::span<const T>(t));
    if (primal(tt) == 0.0) {
      axpy(alpha, std::span<const T>(phat), std::span<T>(out.x));
      last_res = snorm;
      rec.tick(k, out.x, last_res);
      return stop(Termination::breakdown, BreakdownKind::omega_zero, k);
    }
    omega = dot(std::span<const T>(t), std::span<const T>(s)) / tt;
    if (!primal_finite(alpha) || !primal_finite(omega)) {
      --k;
      return stop(Termination::breakdown, BreakdownKind::nonfinite_value, k + 1);
    }
    axpy(alpha, std::span<const T>(phat), std::span<T>(out.x));
    axpy(omega, std::span<const T>(shat), std::span<T>(out.x));
    for (std::size_t i = 0; i < n; ++i) r[i] = s[i] - omega * t[i];
    const double rnorm = primal(norm2(std::span<const T>(r)));
    if (!std::isfinite(rnorm) || !detail::all_primal_finite(std::span<const T>(out.x))) {
      out.x = x_prev;
      --k;
      return stop(Termination::breakdown, BreakdownKind::nonfinite_value, k + 1);
    }
    last_res = rnorm;
    rec.tick(k, out.x, rnorm);
    if (rnorm <= threshold && converged()) return stop(Termination::tolerance_met);
    if (primal(omega) == 0.0) return stop(Termination::breakdown, BreakdownKind::omega_zero, k);
    rho_prev = rho;
  }
  return stop(Termination::budget_exhausted);
}

// ---------------------------------------------------------------------------
/// TFQMR (Freund) with the tau/theta/eta quasi-minimization weights. The
/// reported residual is the bound tau * sqrt(k + 1).
template <KrylovScalar T, class M, class P = IdentityPreconditioner>
  requires PreconditionerFor<P, T>
SolveOutcome<T> tfqmr(const CsrMatrix<M>& a, std::span<const T> b, std::span<const T> x0,
                      const SolverConfig& cfg, const IterationObserver<T>& obs = {},
                      const P& precond = {}) {
  cfg.validate();
  detail::check_system(a, b, x0);
  const std::size_t n = a.rows();
  const double threshold = cfg.residual_tolerance * primal(norm2(b));

  SolveOutcome<T> out;
  out.x.assign(x0.begin(), x0.end());
  detail::Recorder<T> rec(cfg.record_every, obs);

  std::vector<T> r(n), w(n), u(n), zu(n), au(n), v(n), rtilde(n), dhat(n, T(0.0)), tmp(n);
  spmv(a, std::span<const T>(out.x), std::span<T>(tmp));
  for (std::size_t i = 0; i < n; ++i) r[i] = b[i] - tmp[i];
  w = r;
  u = r;
  rtilde = r;
  precond.apply(std::span<const T>(u), std::span<T>(zu));
  spmv(a, std::span<const T>(zu), std::span<T>(au));
  v = au;

  T tau = norm2(std::span<const T>(r));
  T theta(0.0), eta(0.0), alpha(1.0);
  T rho = dot(std::span<const T>(rtilde), std::span<const T>(r));
  std::size_t k = 0;
  double last_res = primal(tau);

  auto stop = [&](Termination term, BreakdownKind kind = BreakdownKind::none,
                  std::size_t at = 0) {
    out.iterations = k;
    out.termination = term;
    out.breakdown = kind;
    out.breakdown_iteration = term == Termination::breakdown ? at : 0;
    out.residual_norm = detail::true_residual(a, b, std::span<const T>(out.x));
    rec.finish(k, out.x, last_res);
    return out;
  };
  auto converged = [&] {
    return detail::true_residual(a, b, std::span<const T>(out.x)) <= threshold;
  };

  if (!primal_finite(tau)) return stop(Termination::breakdown, BreakdownKind::nonfinite_value, 1);
  if (primal(tau) <= threshold) return stop(Termination::tolerance_met);

  for (std::size_t m = 0; k < cfg.max_iterations; ++m) {
    const bool even = m % 2 == 0;
    if (even) {
      const T sigma = dot(std::span<const T>(v), std::span<const T>(rtilde));
      if (!primal_finite(sigma))
        return stop(Termination::breakdown, BreakdownKind::nonfinite_value, k + 1);
      if (primal(sigma) == 0.0) return stop(Termination::breakdown, BreakdownKind::rho_zero, k + 1);
      alpha = rho / sigma;
    }
    // w_{m+1} = w_m - alpha A u_m
    axpy(T(-alpha), std::span<const T>(au), std::span<T>(w));
    // dhat_{m+1} = M^{-1} u_m + (theta^2 / alpha) eta dhat_m
    const T dcoef = (theta * theta / alpha) * eta;
    for (std::size_t i = 0; i < n; ++i) dhat[i] = zu[i] + dcoef * dhat[i];
    const T wnorm = norm2(std::span<const T>(w));
    theta = wnorm / tau;
    const T c = T(1.0) / sqrt(T(1.0) + theta * theta);
    tau = tau * theta * c;
    eta = c * c * alpha;
    if (!primal_finite(theta) || !primal_finite(eta) || !primal_finite(tau))
      return stop(Termination::breakdown, BreakdownKind::nonfinite_value, k + 1);
    tmp = out.x;
    axpy(eta, std::span<const T>(dhat), std::span<T>(out.x));
    if (!detail::all_primal_finite(std::span<const T>(out.x))) {
      out.x = tmp;
      return stop(Termination::breakdown, BreakdownKind::nonfinite_value, k + 1);
    }
    ++k;
    last_res = primal(tau) * std::sqrt(static_cast<double>(k + 1));
    rec.tick(k, out.x, last_res);

    if (primal(tau) == 0.0) {
      // w vanished: the recurrence cannot continue.
      if (converged()) return stop(Termination::tolerance_met);
      return stop(Termination::breakdown, BreakdownKind::rho_zero, k + 1);
    }
    if (last_res <= threshold && converged()) return stop(Termination::tolerance_met);
    if (k >= cfg.max_iterations) break;

    if (even) {
      // u_{m+1} = u_m - alpha v_m, and its product for the next half-sweep.
      for (std::size_t i = 0; i < n; ++i) u[i] = u[i] - alpha * v[i];
      precond.apply(std::span<const T>(u), std::span<T>(zu));
      spmv(a, std::span<const T>(zu), std::span<T>(au));
    } else {
      const T rho_new = dot(std::span<const T>(w), std::span<const T>(rtilde));
      if (!primal_finite(rho_new))
        return stop(Termination::breakdown, BreakdownKind::nonfinite_value, k + 1);
      if (primal(rho_new) == 0.0)
        return stop(Termination::breakdown, BreakdownKind::rho_zero, k + 1);
      const T beta = rho_new / rho;
      rho = rho_new;
      for (std::size_t i = 0; i < n; ++i) u[i] = w[i] + beta * u[i];
      precond.apply(std::span<const T>(u), std::span<T>(zu));
      spmv(a, std::span<const T>(zu), std::span<T>(tmp));
      // v_{m+1} = A u_{m+1} + beta (A u_m + beta v_{m-1})
      for (std::size_t i = 0; i < n; ++i) v[i] = tmp[i] + beta * (au[i] + beta * v[i]);
      au = tmp;
    }
  }
  return stop(Termination::budget_exhausted);
}

/// Dispatches on `cfg.kind`.
template <KrylovScalar T, class M, class P = IdentityPreconditioner>
  requires PreconditionerFor<P, T>
SolveOutcome<T> solve(const CsrMatrix<M>& a, std::span<const T> b, std::span<const T> x0,
                      const SolverConfig& cfg, const IterationObserver<T>& obs = {},
                      const P& precond = {}) {
  switch (cfg.kind) {
    case SolverKind::gmres: return gmres<T>(a, b, x0, cfg, obs, precond);
    case SolverKind::bicgstab: return bicgstab<T>(a, b, x0, cfg, obs, precond);
    case SolverKind::tfqmr: return tfqmr<T>(a, b, x0, cfg, obs, precond);
  }
  throw std::invalid_argument("solve: unknown solver kind");
}

}  // namespace adkrylov
