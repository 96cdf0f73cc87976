#pragma once

/// \file experiment.hpp
/// \brief Benchmark grid over (problem, solver, strategy), error traces and
/// data profiles.
///
/// A trace holds, per recorded iteration k, the errors of the k-th iterate
/// against the manufactured references. A data profile counts, for each
/// iteration budget n, the problems whose error first dropped below a
/// threshold at some recorded iteration <= n.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstddef>
#include <exception>
#include <map>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <tuple>
#include <vector>

#include "adkrylov/autodiff.hpp"
#include "adkrylov/solvers.hpp"

namespace adkrylov {

enum class Strategy { original, lowlevel, highlevel };

inline constexpr std::string_view to_string(Strategy s) {
  switch (s) {
    case Strategy::original: return "original";
    case Strategy::lowlevel: return "lowlevel";
    case Strategy::highlevel: return "highlevel";
  }
  return "?";
}

inline Strategy parse_strategy(std::string_view s) {
  if (s == "original") return Strategy::original;
  if (s == "lowlevel") return Strategy::lowlevel;
  if (s == "highlevel") return Strategy::highlevel;
  throw std::invalid_argument("unknown strategy '" + std::string(s) + "'");
}

enum class ErrorKind { x, dx };

class UsageError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct TraceRecord {
  std::size_t iteration = 0;
  /// ||x_k - x_ref||_2; may be non-finite.
  double err_x = 0.0;
  /// ||dx_k - dx_ref||_2; absent for the original solver.
  std::optional<double> err_dx;
  double residual = 0.0;

  friend bool operator==(const TraceRecord& a, const TraceRecord& b) {
    auto same = [](double p, double q) {
      return (std::isnan(p) && std::isnan(q)) || p == q;
    };
    return a.iteration == b.iteration && same(a.err_x, b.err_x) &&
           a.err_dx.has_value() == b.err_dx.has_value() &&
           (!a.err_dx || same(*a.err_dx, *b.err_dx)) && same(a.residual, b.residual);
  }
};

struct IterationTrace {
  std::string matrix;
  SolverKind solver = SolverKind::gmres;
  Strategy strategy = Strategy::original;
  std::vector<TraceRecord> records;
  /// Solver outcome summary, e.g. "budget_exhausted" or
  /// "x:tolerance_met|dx:breakdown:rho_zero@12" for the two high-level solves.
  std::string termination;

  friend bool operator==(const IterationTrace&, const IterationTrace&) = default;
};

namespace detail {

inline double error_of(std::span<const double> v, std::span<const double> ref) {
  return distance2(v, ref);
}

inline double primal_error(std::span<const Dual> v, std::span<const double> ref) {
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = v[i].value - ref[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

inline double tangent_error(std::span<const Dual> v, std::span<const double> ref) {
  double sum = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    const double d = v[i].tangent - ref[i];
    sum += d * d;
  }
  return std::sqrt(sum);
}

inline double norm_of(std::span<const double> v) {
  double sum = 0.0;
  for (double e : v) sum += e * e;
  return std::sqrt(sum);
}

}  // namespace detail

/// Runs one grid cell. x0 = 0 for every solve.
inline IterationTrace run_cell(const TangentProblem& p, SolverKind solver, Strategy strategy,
                               SolverConfig cfg) {
  cfg.kind = solver;
  IterationTrace trace;
  trace.matrix = p.name;
  trace.solver = solver;
  trace.strategy = strategy;
  const std::span<const double> x_ref(p.x_ref), dx_ref(p.dx_ref);

  switch (strategy) {
    case Strategy::original: {
      IterationObserver<double> obs = [&](const IterationState<double>& s) {
        trace.records.push_back({s.iteration, detail::error_of(s.x, x_ref), std::nullopt, s.residual});
      };
      const DenseVector<double> x0(p.size(), 0.0);
      const auto out = solve<double>(p.a, std::span<const double>(p.b), std::span<const double>(x0),
                                     cfg, obs);
      trace.termination = summary(out);
      break;
    }
    case Strategy::lowlevel: {
      IterationObserver<Dual> obs = [&](const IterationState<Dual>& s) {
        trace.records.push_back({s.iteration, detail::primal_error(s.x, x_ref),
                                 detail::tangent_error(s.x, dx_ref), s.residual});
      };
      const auto r = solve_lowlevel(p, cfg, obs);
      trace.termination = summary(r.outcome);
      break;
    }
    case Strategy::highlevel: {
      // The two solves are recorded separately and merged on iteration index;
      // a solve that stopped earlier keeps its last value.
      std::map<std::size_t, std::pair<double, double>> xs, dxs;  // k -> (err, residual)
      IterationObserver<double> obs_x = [&](const IterationState<double>& s) {
        xs[s.iteration] = {detail::error_of(s.x, x_ref), s.residual};
      };
      IterationObserver<double> obs_dx = [&](const IterationState<double>& s) {
        dxs[s.iteration] = {detail::error_of(s.x, dx_ref), s.residual};
      };
      const auto r = solve_highlevel(p, cfg, obs_x, obs_dx);
      trace.termination = "x:" + summary(r.outcome_x) + "|dx:" + summary(r.outcome_dx);

      std::vector<std::size_t> ks;
      for (const auto& [k, v] : xs) ks.push_back(k);
      for (const auto& [k, v] : dxs) ks.push_back(k);
      std::sort(ks.begin(), ks.end());
      ks.erase(std::unique(ks.begin(), ks.end()), ks.end());
      std::pair<double, double> last_x{detail::norm_of(x_ref), detail::norm_of(p.b)};
      std::pair<double, double> last_dx{detail::norm_of(dx_ref),
                                        detail::norm_of(tangent_rhs(p, r.x))};
      for (std::size_t k : ks) {
        if (auto it = xs.find(k); it != xs.end()) last_x = it->second;
        if (auto it = dxs.find(k); it != dxs.end()) last_dx = it->second;
        trace.records.push_back({k, last_x.first, last_dx.first, last_dx.second});
      }
      break;
    }
  }
  return trace;
}

/// One trace per (problem, solver, strategy), ordered by matrix name, then
/// solver, then strategy (enum order). Cells run on up to `jobs` threads.
/// A cell that throws yields a trace with no records and an "error:" summary.
inline std::vector<IterationTrace> run_grid(std::span<const TangentProblem> problems,
                                            std::span<const SolverKind> solvers,
                                            std::span<const Strategy> strategies,
                                            const SolverConfig& cfg, std::size_t jobs = 1) {
  cfg.validate();
  struct Cell {
    const TangentProblem* problem;
    SolverKind solver;
    Strategy strategy;
  };
  std::vector<Cell> cells;
  for (const auto& p : problems)
    for (auto s : solvers)
      for (auto st : strategies) cells.push_back({&p, s, st});
  std::stable_sort(cells.begin(), cells.end(), [](const Cell& a, const Cell& b) {
    return std::tuple(a.problem->name, a.solver, a.strategy) <
           std::tuple(b.problem->name, b.solver, b.strategy);
  });

  std::vector<IterationTrace> traces(cells.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < cells.size(); i = next++) {
      const auto& c = cells[i];
      try {
        traces[i] = run_cell(*c.problem, c.solver, c.strategy, cfg);
      } catch (const std::exception& e) {
        IterationTrace t;
        t.matrix = c.problem->name;
        t.solver = c.solver;
        t.strategy = c.strategy;
        t.termination = std::string("error:") + e.what();
        traces[i] = std::move(t);
      }
    }
  };
  const std::size_t nthreads = std::max<std::size_t>(1, std::min(jobs, cells.size()));
  if (nthreads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::size_t t = 0; t < nthreads; ++t) pool.emplace_back(worker);
  }
  return traces;
}

/// Smallest recorded iteration whose selected error is finite and < tau.
inline std::optional<std::size_t> first_solved_iteration(const IterationTrace& t, ErrorKind which,
                                                         double tau) {
  if (!(tau > 0.0)) throw UsageError("first_solved_iteration: tau must be positive");
  if (which == ErrorKind::dx && t.strategy == Strategy::original)
    throw UsageError("first_solved_iteration: original traces carry no dx error");
  for (const auto& r : t.records) {
    const double e = which == ErrorKind::x ? r.err_x : r.err_dx.value_or(HUGE_VAL);
    if (std::isfinite(e) && e < tau) return r.iteration;
  }
  return std::nullopt;
}

struct ProfilePoint {
  std::size_t budget = 0;
  std::size_t solved = 0;
  friend bool operator==(const ProfilePoint&, const ProfilePoint&) = default;
};

struct DataProfileCurve {
  SolverKind solver = SolverKind::gmres;
  Strategy strategy = Strategy::original;
  double threshold = 0.0;
  std::vector<ProfilePoint> points;
  std::size_t total_problems = 0;
};

/// Problems solved within each budget. All traces must share solver and
/// strategy; budgets must be strictly increasing.
inline DataProfileCurve data_profile(std::span<const IterationTrace> traces, ErrorKind which,
                                     double tau, std::span<const std::size_t> budgets) {
  DataProfileCurve curve;
  curve.threshold = tau;
  curve.total_problems = traces.size();
  if (!traces.empty()) {
    curve.solver = traces.front().solver;
    curve.strategy = traces.front().strategy;
  }
  for (const auto& t : traces)
    if (t.solver != curve.solver || t.strategy != curve.strategy)
      throw UsageError("data_profile: traces mix solvers or strategies");
  for (std::size_t i = 1; i < budgets.size(); ++i)
    if (budgets[i] <= budgets[i - 1]) throw UsageError("data_profile: budgets must increase");

  std::vector<std::size_t> solved_at;
  for (const auto& t : traces)
    if (auto k = first_solved_iteration(t, which, tau)) solved_at.push_back(*k);
  std::sort(solved_at.begin(), solved_at.end());

  curve.points.reserve(budgets.size());
  auto it = solved_at.begin();
  for (std::size_t n : budgets) {
    while (it != solved_at.end() && *it <= n) ++it;
    curve.points.push_back({n, static_cast<std::size_t>(it - solved_at.begin())});
  }
  return curve;
}

/// 1, 2, ..., n.
inline std::vector<std::size_t> budgets_up_to(std::size_t n) {
  std::vector<std::size_t> b(n);
  for (std::size_t i = 0; i < n; ++i) b[i] = i + 1;
  return b;
}

}  // namespace adkrylov
