// adkrylov: fetch SuiteSparse matrices, run the differentiation benchmark,
// and turn traces into data profiles and gnuplot scripts.

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "adkrylov/cli.hpp"
#include "adkrylov/curl_transport.hpp"

namespace {

using adkrylov::cli::ExitCode;

std::vector<std::string> split_list(const std::vector<std::string>& items) {
  std::vector<std::string> out;
  for (const auto& item : items) {
    std::size_t start = 0;
    while (start <= item.size()) {
      const auto pos = item.find(',', start);
      const auto tok = item.substr(start, pos == std::string::npos ? std::string::npos : pos - start);
      if (!tok.empty()) out.push_back(tok);
      if (pos == std::string::npos) break;
      start = pos + 1;
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Low-level vs high-level forward differentiation of Krylov solvers"};
  app.require_subcommand(1);

  // list
  auto* list = app.add_subcommand("list", "Print the bundled matrix manifest as CSV");
  std::size_t list_max_dim = 0;
  list->add_option("--max-dim", list_max_dim, "Only matrices with rows, cols <= N (0: all)");

  // fetch
  adkrylov::cli::FetchSpec fetch_spec;
  std::string fetch_cache, fetch_base;
  auto* fetch = app.add_subcommand("fetch", "Download matrices into the cache");
  fetch->add_option("names", fetch_spec.names, "Manifest names");
  fetch->add_flag("--all", fetch_spec.all, "Every manifest matrix allowed by --max-dim");
  fetch->add_option("--max-dim", fetch_spec.max_dim, "Size filter for --all (0: no filter)")
      ->capture_default_str();
  fetch->add_option("--cache-dir", fetch_cache, "Cache directory (else $ADKRYLOV_CACHE)");
  fetch->add_option("--base-url", fetch_base, "Archive host (else $ADKRYLOV_BASE_URL)");
  fetch->add_flag("--force", fetch_spec.force, "Download again even if cached");

  // run
  adkrylov::cli::RunSpec run_spec;
  std::vector<std::string> run_solvers{"gmres,bicgstab,tfqmr"};
  std::vector<std::string> run_strategies{"original,lowlevel,highlevel"};
  std::string run_cache, run_base, run_out = "traces";
  auto* run = app.add_subcommand("run", "Run the solver x strategy grid and write trace CSVs");
  run->add_option("--matrix", run_spec.matrices, "Manifest matrix name (repeatable)");
  run->add_option("--mtx", run_spec.mtx_files, "Local Matrix Market file (repeatable)");
  run->add_flag("--all", run_spec.all, "Every manifest matrix allowed by --max-dim");
  run->add_option("--max-dim", run_spec.max_dim, "Size filter for --all (0: no filter)")
      ->capture_default_str();
  run->add_option("--solver", run_solvers, "gmres, bicgstab, tfqmr (comma list)")
      ->capture_default_str();
  run->add_option("--strategy", run_strategies, "original, lowlevel, highlevel (comma list)")
      ->capture_default_str();
  run->add_option("--max-iterations", run_spec.cfg.max_iterations, "Iteration budget")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  run->add_option("--restart", run_spec.cfg.gmres_restart, "GMRES restart length")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  run->add_option("--tol", run_spec.cfg.residual_tolerance,
                  "Relative residual tolerance (0 runs the full budget)")
      ->capture_default_str()
      ->check(CLI::NonNegativeNumber);
  run->add_option("--record-every", run_spec.cfg.record_every, "Record every k-th iteration")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  run->add_option("--seed", run_spec.seed, "Base seed for manufactured solutions")
      ->capture_default_str();
  run->add_option("--out", run_out, "Output directory")->capture_default_str();
  run->add_option("--jobs", run_spec.jobs, "Worker threads")->capture_default_str()->check(
      CLI::PositiveNumber);
  run->add_option("--cache-dir", run_cache, "Cache directory (else $ADKRYLOV_CACHE)");
  run->add_option("--base-url", run_base, "Archive host (else $ADKRYLOV_BASE_URL)");
  run->add_flag("--offline", run_spec.offline, "Use cached matrices only");

  // profile
  adkrylov::cli::ProfileSpec profile_spec;
  std::string profile_which = "auto", profile_dir, profile_out;
  auto* profile = app.add_subcommand("profile", "Compute data profiles from trace CSVs");
  profile->add_option("--traces", profile_dir, "Directory written by `run`")->required();
  profile->add_option("--tau", profile_spec.tau, "Error threshold")->capture_default_str();
  profile->add_option("--which", profile_which, "x, dx or auto")
      ->capture_default_str()
      ->check(CLI::IsMember({"x", "dx", "auto"}));
  profile->add_option("--budget", profile_spec.budget, "Largest iteration budget")
      ->capture_default_str();
  profile->add_option("--out", profile_out, "Output CSV")->required();

  // plot
  std::string plot_in, plot_out;
  auto* plot = app.add_subcommand("plot", "Emit a gnuplot script for a profile or trace CSV");
  plot->add_option("input", plot_in, "Profile or trace CSV")->required();
  plot->add_option("--out", plot_out, "Output script (.gp)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return ExitCode::kUsage;
  }

  const adkrylov::Transport transport = adkrylov::curl_get;
  try {
    if (*list) return adkrylov::cli::cmd_list(list_max_dim, std::cout);
    if (*fetch) {
      if (!fetch_cache.empty()) fetch_spec.cache_dir = fetch_cache;
      if (!fetch_base.empty()) fetch_spec.base_url = fetch_base;
      return adkrylov::cli::cmd_fetch(fetch_spec, transport, std::cout, std::cerr);
    }
    if (*run) {
      run_spec.solvers.clear();
      for (const auto& s : split_list(run_solvers))
        run_spec.solvers.push_back(adkrylov::parse_solver_kind(s));
      run_spec.strategies.clear();
      for (const auto& s : split_list(run_strategies))
        run_spec.strategies.push_back(adkrylov::parse_strategy(s));
      if (!run_cache.empty()) run_spec.cache_dir = run_cache;
      if (!run_base.empty()) run_spec.base_url = run_base;
      run_spec.out_dir = run_out;
      return adkrylov::cli::cmd_run(run_spec, transport, std::cout, std::cerr);
    }
    if (*profile) {
      profile_spec.trace_dir = profile_dir;
      profile_spec.out = profile_out;
      profile_spec.which = profile_which == "x"    ? adkrylov::cli::ProfileWhich::x
                           : profile_which == "dx" ? adkrylov::cli::ProfileWhich::dx
                                                   : adkrylov::cli::ProfileWhich::automatic;
      return adkrylov::cli::cmd_profile(profile_spec, std::cerr);
    }
    if (*plot) return adkrylov::cli::cmd_plot(plot_in, plot_out, std::cerr);
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << '\n';
    return ExitCode::kUsage;
  }
  return ExitCode::kUsage;
}
