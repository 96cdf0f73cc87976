#pragma once

/// \file plot.hpp
/// \brief gnuplot scripts for profile and trace CSVs. Data is inlined so the
/// script runs on its own.

#include <ostream>
#include <string>
#include <string_view>

#include "adkrylov/trace_io.hpp"

namespace adkrylov {

namespace detail {

inline std::string gp_quote(std::string_view s) {
  std::string out = "'";
  for (char c : s) {
    if (c == '\'') out += "''";
    else out += c;
  }
  return out + "'";
}

inline std::string script_preamble(std::string_view image) {
  std::string s = "# gnuplot script generated by adkrylov\n";
  s += "set terminal pngcairo size 1200,800 enhanced\n";
  s += "set output " + gp_quote(image) + "\n";
  s += "set grid\n";
  s += "set key outside right top\n";
  return s;
}

inline std::string empty_plot() { return "set xrange [0:1]\nset yrange [0:1]\nplot NaN notitle\n"; }

}  // namespace detail

/// Problems solved vs iteration budget, one step series per (solver, strategy).
inline std::string profile_plot_script(std::span<const DataProfileCurve> curves,
                                       std::string_view image) {
  std::string s = detail::script_preamble(image);
  s += "set xlabel 'iterations'\nset ylabel 'problems solved'\n";
  if (curves.empty()) return s + detail::empty_plot();
  std::string plot = "plot ";
  for (std::size_t i = 0; i < curves.size(); ++i) {
    const auto& c = curves[i];
    const std::string block = "$profile" + std::to_string(i);
    s += block + " << EOD\n";
    for (const auto& p : c.points) s += std::to_string(p.budget) + ' ' + std::to_string(p.solved) + '\n';
    s += "EOD\n";
    if (i) plot += ", \\\n     ";
    plot += block + " using 1:2 with steps lw 2 title " +
            detail::gp_quote(std::string(to_string(c.solver)) + " " +
                             std::string(to_string(c.strategy)));
  }
  if (!curves.empty()) s += "set yrange [0:" + std::to_string(curves.front().total_problems) + "]\n";
  return s + plot + '\n';
}

/// log error vs iteration for every trace; err_x and (when present) err_dx.
/// Non-finite and non-positive errors are left out.
inline std::string trace_plot_script(std::span<const IterationTrace> traces, std::string_view image) {
  std::string s = detail::script_preamble(image);
  s += "set xlabel 'iterations'\nset ylabel 'L2 error'\nset logscale y\nset format y '10^{%L}'\n";
  std::string plot;
  std::size_t block_id = 0;
  auto add_series = [&](const IterationTrace& t, bool dx) {
    const std::string block = "$trace" + std::to_string(block_id++);
    s += block + " << EOD\n";
    for (const auto& r : t.records) {
      const double e = dx ? r.err_dx.value_or(NAN) : r.err_x;
      if (!std::isfinite(e) || e <= 0.0) continue;
      s += std::to_string(r.iteration) + ' ' + format_double(e) + '\n';
    }
    s += "EOD\n";
    plot += plot.empty() ? "plot " : ", \\\n     ";
    plot += block + " using 1:2 with lines lw 2 title " +
            detail::gp_quote(t.matrix + " " + std::string(to_string(t.solver)) + " " +
                             std::string(to_string(t.strategy)) + (dx ? " dx" : " x"));
  };
  for (const auto& t : traces) {
    if (t.strategy == Strategy::original) {
      add_series(t, false);
    } else {
      add_series(t, true);
    }
  }
  if (plot.empty()) {
    s += "unset logscale y\n";
    return s + detail::empty_plot();
  }
  return s + plot + '\n';
}

/// Dispatches on the CSV header. Warns on `warn` when the file has no data rows.
inline std::string plot_script_from_csv(std::string_view csv, std::string_view image,
                                        std::ostream& warn) {
  const auto first = csv.substr(0, csv.find('\n'));
  const auto header = !first.empty() && first.back() == '\r' ? first.substr(0, first.size() - 1) : first;
  if (header == kProfileHeader) {
    const auto curves = parse_profile_csv(csv);
    if (curves.empty()) warn << "warning: profile CSV has no data rows; emitting an empty plot\n";
    return profile_plot_script(curves, image);
  }
  if (header == kTraceHeader) {
    const auto traces = parse_trace_csv(csv);
    if (traces.empty()) warn << "warning: trace CSV has no data rows; emitting an empty plot\n";
    return trace_plot_script(traces, image);
  }
  throw ParseError("unrecognized CSV header '" + std::string(header) + "'", 1);
}

}  // namespace adkrylov
