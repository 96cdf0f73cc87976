#pragma once

/// \file cli.hpp
/// \brief Implementations of the `adkrylov` subcommands. Each returns a
/// process exit code; argument parsing lives in tools/adkrylov.cpp.

#include <algorithm>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "adkrylov/autodiff.hpp"
#include "adkrylov/experiment.hpp"
#include "adkrylov/fetch.hpp"
#include "adkrylov/manifest.hpp"
#include "adkrylov/matrix_market.hpp"
#include "adkrylov/plot.hpp"
#include "adkrylov/trace_io.hpp"

namespace adkrylov::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kFetch = 3,
  kParse = 4,
  kPartialFailure = 5,
};

struct FetchSpec {
  std::vector<std::string> names;
  bool all = false;
  std::size_t max_dim = kDefaultMaxDim;
  std::optional<std::string> cache_dir;
  std::optional<std::string> base_url;
  bool force = false;
};

struct RunSpec {
  /// Manifest names; fetched when not cached.
  std::vector<std::string> matrices;
  /// Local Matrix Market files; the file stem is the matrix name.
  std::vector<std::string> mtx_files;
  /// Select the whole manifest subset allowed by max_dim.
  bool all = false;
  std::size_t max_dim = kDefaultMaxDim;
  std::vector<SolverKind> solvers{SolverKind::gmres, SolverKind::bicgstab, SolverKind::tfqmr};
  std::vector<Strategy> strategies{Strategy::original, Strategy::lowlevel, Strategy::highlevel};
  SolverConfig cfg;
  std::uint64_t seed = 1;
  std::filesystem::path out_dir = "traces";
  std::size_t jobs = 1;
  std::optional<std::string> cache_dir;
  std::optional<std::string> base_url;
  /// Never touch the network; uncached matrices are per-matrix failures.
  bool offline = false;
};

/// Which error a profile counts: x for all, dx for differentiated strategies
/// only, or auto (x for original, dx otherwise).
enum class ProfileWhich { x, dx, automatic };

struct ProfileSpec {
  std::filesystem::path trace_dir;
  double tau = 1e-2;
  ProfileWhich which = ProfileWhich::automatic;
  std::size_t budget = 2000;
  std::filesystem::path out;
};

inline int cmd_list(std::size_t max_dim, std::ostream& out) {
  out << "id,name,group,rows,cols,nonzeros\n";
  for (const auto& e : manifest_subset(max_dim))
    out << e.id << ',' << e.name << ',' << e.group << ',' << e.rows << ',' << e.cols << ','
        << e.nonzeros << '\n';
  return kOk;
}

inline int cmd_fetch(const FetchSpec& spec, const Transport& transport, std::ostream& out,
                     std::ostream& err) {
  std::vector<MatrixManifestEntry> entries;
  if (spec.all) entries = manifest_subset(spec.max_dim);
  for (const auto& n : spec.names) {
    const auto e = find_manifest_entry(n);
    if (!e) {
      err << "error: '" << n << "' is not in the matrix manifest (see `adkrylov list`)\n";
      return kUsage;
    }
    entries.push_back(*e);
  }
  if (entries.empty()) {
    err << "error: nothing to fetch; name matrices or pass --all\n";
    return kUsage;
  }
  const auto cache = resolve_cache_dir(spec.cache_dir);
  FetchOptions opts{resolve_base_url(spec.base_url), spec.force, &err};
  int rc = kOk;
  for (const auto& e : entries) {
    try {
      out << fetch_matrix(e.group, e.name, cache, transport, opts).string() << '\n';
    } catch (const FetchError& ex) {
      err << "error: " << e.name << ": " << ex.what() << '\n';
      rc = kFetch;
    } catch (const std::exception& ex) {
      err << "error: " << e.name << ": " << ex.what() << '\n';
      rc = kFetch;
    }
  }
  return rc;
}

namespace detail {

struct Source {
  std::string name;
  std::string group;
  std::optional<std::filesystem::path> file;
};

inline std::string read_text(const std::filesystem::path& p) { return adkrylov::read_file(p); }

inline void write_text(const std::filesystem::path& p, std::string_view text) {
  std::ofstream out(p, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write '" + p.string() + "'");
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
}

}  // namespace detail

inline int cmd_run(const RunSpec& spec, const Transport& transport, std::ostream& out,
                   std::ostream& err) {
  try {
    spec.cfg.validate();
  } catch (const std::invalid_argument& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  if (spec.solvers.empty() || spec.strategies.empty()) {
    err << "error: at least one solver and one strategy are required\n";
    return kUsage;
  }
  std::vector<detail::Source> sources;
  if (spec.all)
    for (const auto& e : manifest_subset(spec.max_dim))
      sources.push_back({std::string(e.name), std::string(e.group), std::nullopt});
  for (const auto& n : spec.matrices) {
    const auto e = find_manifest_entry(n);
    if (!e) {
      err << "error: '" << n << "' is not in the matrix manifest; use --mtx for local files\n";
      return kUsage;
    }
    sources.push_back({std::string(e->name), std::string(e->group), std::nullopt});
  }
  for (const auto& f : spec.mtx_files)
    sources.push_back({std::filesystem::path(f).stem().string(), "local", f});
  std::sort(sources.begin(), sources.end(),
            [](const auto& a, const auto& b) { return a.name < b.name; });
  sources.erase(std::unique(sources.begin(), sources.end(),
                            [](const auto& a, const auto& b) { return a.name == b.name; }),
                sources.end());
  if (sources.empty()) {
    err << "error: empty matrix selection; use --matrix, --mtx or --all\n";
    return kUsage;
  }

  const auto cache = resolve_cache_dir(spec.cache_dir);
  const FetchOptions opts{resolve_base_url(spec.base_url), false, &err};
  std::vector<TangentProblem> problems;
  std::vector<std::string> failures;
  int failure_class = kOk;
  for (const auto& s : sources) {
    try {
      std::filesystem::path path;
      if (s.file) {
        path = *s.file;
      } else {
        path = cache_path(cache, s.group, s.name);
        if (!std::filesystem::exists(path)) {
          if (spec.offline) throw FetchError("not cached and --offline given: " + path.string());
          path = fetch_matrix(s.group, s.name, cache, transport, opts);
        }
      }
      auto a = read_matrix_market_file(path.string());
      if (!a.square()) throw ParseError("matrix is not square", 2);
      auto p = manufacture_problem(std::move(a), std::nullopt, problem_seed(spec.seed, s.name));
      p.name = s.name;
      problems.push_back(std::move(p));
    } catch (const FetchError& e) {
      failures.push_back(s.name + ": " + e.what());
      if (failure_class == kOk) failure_class = kFetch;
    } catch (const std::exception& e) {
      failures.push_back(s.name + ": " + e.what());
      if (failure_class == kOk) failure_class = kParse;
    }
  }
  for (const auto& f : failures) err << "error: " << f << '\n';

  std::filesystem::create_directories(spec.out_dir);
  if (!failures.empty()) {
    std::string log;
    for (const auto& f : failures) log += f + '\n';
    detail::write_text(spec.out_dir / "errors.log", log);
  }
  if (problems.empty()) return failure_class;

  const auto traces = run_grid(problems, spec.solvers, spec.strategies, spec.cfg, spec.jobs);
  for (const auto& t : traces) {
    const auto path = spec.out_dir / trace_file_name(t);
    detail::write_text(path, write_trace_csv(t));
    out << path.string() << '\n';
  }
  return failures.empty() ? kOk : kPartialFailure;
}

/// Reads every trace CSV in a directory, in file-name order.
inline std::vector<IterationTrace> load_traces(const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> files;
  for (const auto& e : std::filesystem::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<IterationTrace> traces;
  for (const auto& f : files) {
    const auto text = detail::read_text(f);
    if (!text.starts_with(kTraceHeader)) continue;
    try {
      for (auto& t : parse_trace_csv(text)) traces.push_back(std::move(t));
    } catch (const ParseError& e) {
      throw ParseError(f.filename().string() + ": " + e.what(), e.line());
    }
  }
  return traces;
}

/// One curve per (solver, strategy) present in the traces.
inline std::vector<DataProfileCurve> profile_curves(const std::vector<IterationTrace>& traces,
                                                    double tau, ProfileWhich which,
                                                    std::size_t budget) {
  std::map<std::pair<SolverKind, Strategy>, std::vector<IterationTrace>> groups;
  for (const auto& t : traces) {
    if (which == ProfileWhich::dx && t.strategy == Strategy::original) continue;
    groups[{t.solver, t.strategy}].push_back(t);
  }
  const auto budgets = budgets_up_to(budget);
  std::vector<DataProfileCurve> curves;
  for (const auto& [key, group] : groups) {
    ErrorKind kind = ErrorKind::x;
    if (which == ProfileWhich::dx ||
        (which == ProfileWhich::automatic && key.second != Strategy::original))
      kind = ErrorKind::dx;
    curves.push_back(data_profile(group, kind, tau, budgets));
  }
  return curves;
}

inline int cmd_profile(const ProfileSpec& spec, std::ostream& err) {
  if (!(spec.tau > 0.0) || spec.budget < 1) {
    err << "error: --tau must be positive and --budget at least 1\n";
    return kUsage;
  }
  if (!std::filesystem::is_directory(spec.trace_dir)) {
    err << "error: trace directory '" << spec.trace_dir.string() << "' does not exist\n";
    return kUsage;
  }
  std::vector<IterationTrace> traces;
  try {
    traces = load_traces(spec.trace_dir);
  } catch (const ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kParse;
  }
  if (traces.empty()) {
    err << "error: no trace CSVs found in '" << spec.trace_dir.string() << "'\n";
    return kUsage;
  }
  const auto curves = profile_curves(traces, spec.tau, spec.which, spec.budget);
  detail::write_text(spec.out, write_profile_csv(curves));
  return kOk;
}

inline int cmd_plot(const std::filesystem::path& input, const std::filesystem::path& out,
                    std::ostream& err) {
  std::string text;
  try {
    text = detail::read_text(input);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
  auto image = out;
  image.replace_extension(".png");
  try {
    detail::write_text(out, plot_script_from_csv(text, image.string(), err));
  } catch (const ParseError& e) {
    err << "error: " << input.string() << ": " << e.what() << '\n';
    return kParse;
  }
  return kOk;
}

}  // namespace adkrylov::cli
