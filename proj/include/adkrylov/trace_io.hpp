#pragma once

/// \file trace_io.hpp
/// \brief CSV forms of traces and data profiles.
///
/// Trace CSV:   matrix,solver,strategy,iteration,err_x,err_dx,residual,termination
/// Profile CSV: solver,strategy,iteration,problems_solved,total_problems
///
/// Comma separated, '\n' line endings, header row, shortest round-trip
/// decimal formatting. Non-finite reals are written as `nonfinite`; `err_dx`
/// is empty for the original solver.

#include <cmath>
#include <limits>
#include <string>
#include <string_view>
#include <vector>

#include "adkrylov/experiment.hpp"
#include "adkrylov/matrix_market.hpp"

namespace adkrylov {

inline constexpr std::string_view kTraceHeader =
    "matrix,solver,strategy,iteration,err_x,err_dx,residual,termination";
inline constexpr std::string_view kProfileHeader =
    "solver,strategy,iteration,problems_solved,total_problems";
inline constexpr std::string_view kNonFinite = "nonfinite";

inline std::string format_real(double v) {
  return std::isfinite(v) ? format_double(v) : std::string(kNonFinite);
}

/// `<matrix>__<solver>__<strategy>.csv`
inline std::string trace_file_name(const IterationTrace& t) {
  return t.matrix + "__" + std::string(to_string(t.solver)) + "__" +
         std::string(to_string(t.strategy)) + ".csv";
}

inline std::string write_trace_csv(const IterationTrace& t) {
  std::string out(kTraceHeader);
  out += '\n';
  const std::string prefix = t.matrix + ',' + std::string(to_string(t.solver)) + ',' +
                             std::string(to_string(t.strategy)) + ',';
  for (const auto& r : t.records) {
    out += prefix;
    out += std::to_string(r.iteration);
    out += ',';
    out += format_real(r.err_x);
    out += ',';
    if (r.err_dx) out += format_real(*r.err_dx);
    out += ',';
    out += format_real(r.residual);
    out += ',';
    out += t.termination;
    out += '\n';
  }
  return out;
}

namespace detail {

inline std::vector<std::string_view> split_csv(std::string_view line) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = line.find(',', start);
    if (pos == std::string_view::npos) {
      out.push_back(line.substr(start));
      return out;
    }
    out.push_back(line.substr(start, pos - start));
    start = pos + 1;
  }
}

inline std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (start < text.size()) {
    auto pos = text.find('\n', start);
    if (pos == std::string_view::npos) pos = text.size();
    auto line = text.substr(start, pos - start);
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    out.push_back(line);
    start = pos + 1;
  }
  return out;
}

inline double parse_real(std::string_view tok, std::size_t line) {
  if (tok == kNonFinite) return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  if (!parse_number(tok, v)) throw ParseError("bad number '" + std::string(tok) + "'", line);
  return v;
}

inline std::size_t parse_count(std::string_view tok, std::size_t line) {
  std::size_t v = 0;
  if (!parse_number(tok, v)) throw ParseError("bad count '" + std::string(tok) + "'", line);
  return v;
}

}  // namespace detail

/// Parses the rows of one trace CSV. Rows from several traces in one file
/// come back as several traces, in order of first appearance.
inline std::vector<IterationTrace> parse_trace_csv(std::string_view text) {
  const auto lines = detail::split_lines(text);
  if (lines.empty() || lines[0] != kTraceHeader) throw ParseError("expected trace CSV header", 1);
  std::vector<IterationTrace> traces;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    if (lines[i].empty()) continue;
    const auto f = detail::split_csv(lines[i]);
    if (f.size() != 8) throw ParseError("expected 8 fields", lineno);
    SolverKind solver;
    Strategy strategy;
    try {
      solver = parse_solver_kind(f[1]);
      strategy = parse_strategy(f[2]);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), lineno);
    }
    TraceRecord r;
    r.iteration = detail::parse_count(f[3], lineno);
    r.err_x = detail::parse_real(f[4], lineno);
    if (!f[5].empty()) r.err_dx = detail::parse_real(f[5], lineno);
    r.residual = detail::parse_real(f[6], lineno);
    if ((strategy == Strategy::original) == r.err_dx.has_value())
      throw ParseError("err_dx must be empty exactly for strategy=original", lineno);

    IterationTrace* t = nullptr;
    for (auto& c : traces)
      if (c.matrix == f[0] && c.solver == solver && c.strategy == strategy) t = &c;
    if (!t) {
      traces.push_back({std::string(f[0]), solver, strategy, {}, std::string(f[7])});
      t = &traces.back();
    }
    if (!t->records.empty() && r.iteration <= t->records.back().iteration)
      throw ParseError("iterations must increase within a trace", lineno);
    t->records.push_back(r);
  }
  return traces;
}

inline std::string write_profile_csv(std::span<const DataProfileCurve> curves) {
  std::string out(kProfileHeader);
  out += '\n';
  for (const auto& c : curves) {
    const std::string prefix =
        std::string(to_string(c.solver)) + ',' + std::string(to_string(c.strategy)) + ',';
    for (const auto& p : c.points) {
      out += prefix + std::to_string(p.budget) + ',' + std::to_string(p.solved) + ',' +
             std::to_string(c.total_problems) + '\n';
    }
  }
  return out;
}

/// Reads a profile CSV back into curves (threshold is not stored and is left 0).
inline std::vector<DataProfileCurve> parse_profile_csv(std::string_view text) {
  const auto lines = detail::split_lines(text);
  if (lines.empty() || lines[0] != kProfileHeader) throw ParseError("expected profile CSV header", 1);
  std::vector<DataProfileCurve> curves;
  for (std::size_t i = 1; i < lines.size(); ++i) {
    const std::size_t lineno = i + 1;
    if (lines[i].empty()) continue;
    const auto f = detail::split_csv(lines[i]);
    if (f.size() != 5) throw ParseError("expected 5 fields", lineno);
    SolverKind solver;
    Strategy strategy;
    try {
      solver = parse_solver_kind(f[0]);
      strategy = parse_strategy(f[1]);
    } catch (const std::invalid_argument& e) {
      throw ParseError(e.what(), lineno);
    }
    const ProfilePoint p{detail::parse_count(f[2], lineno), detail::parse_count(f[3], lineno)};
    const std::size_t total = detail::parse_count(f[4], lineno);
    DataProfileCurve* c = nullptr;
    for (auto& cc : curves)
      if (cc.solver == solver && cc.strategy == strategy) c = &cc;
    if (!c) {
      curves.push_back({solver, strategy, 0.0, {}, total});
      c = &curves.back();
    }
    c->points.push_back(p);
  }
  return curves;
}

}  // namespace adkrylov
