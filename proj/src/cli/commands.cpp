#include "hetero_spectra/cli/commands.hpp"

#include <cstdlib>
#include <fstream>
#include <ostream>
#include <sstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "hetero_spectra/cli/config.hpp"
#include "hetero_spectra/cli/matrix_io.hpp"
#include "hetero_spectra/cli/results.hpp"
#include "hetero_spectra/cli/svg.hpp"
#include "hetero_spectra/metrics.hpp"
#include "hetero_spectra/solvers.hpp"

namespace hs::cli {

namespace fs = std::filesystem;
using json = nlohmann::json;

namespace {

struct SolveOutcome {
  SymMatrix L;
  SymMatrix D;
  SolverTrace trace;
  bool has_trace = false;
  std::optional<double> fixed_point_residual;
};

SolveOutcome solve_with(Method method, const SymMatrix& sigma, double tau, std::size_t r,
                        const StopRule& stop) {
  SolveOutcome o;
  auto diag_rest = [&](SymMatrix l) {
    o.D = pdiag(sigma - l);
    o.L = std::move(l);
    o.trace.converged = true;
  };
  switch (method) {
    case Method::svd: diag_rest(best_rank_r_psd(sigma, r)); break;
    case Method::dd: diag_rest(diag_deleted_pca(sigma, r)); break;
    case Method::hpca: diag_rest(heteropca(sigma, r).L); break;
    case Method::dhpca: diag_rest(deflated_heteropca(sigma, r).L); break;
    case Method::hpca_plus: {
      auto res = heteropca_psd(sigma, r);
      o.L = std::move(res.L);
      o.D = std::move(res.D);
      o.trace = std::move(res.trace);
      o.trace.converged = true;  // fixed step count
      o.has_trace = true;
      break;
    }
    case Method::rmtfa: {
      auto res = rmtfa(sigma, tau, stop);
      o.L = std::move(res.decomposition.L);
      o.D = std::move(res.decomposition.D);
      o.trace = std::move(res.trace);
      o.has_trace = true;
      o.fixed_point_residual = rmtfa_fixed_point_residual(sigma, o.L, tau);
      break;
    }
    case Method::si: {
      auto res = soft_impute_diag(sigma, tau, stop);
      o.L = std::move(res.L);
      o.D = std::move(res.D);
      o.trace = std::move(res.trace);
      o.has_trace = true;
      o.fixed_point_residual = soft_impute_fixed_point_residual(sigma, o.L, tau);
      break;
    }
  }
  return o;
}

bool write_file(const fs::path& path, const std::string& content, std::ostream& err) {
  std::ofstream f(path, std::ios::binary);
  f << content;
  f.close();
  if (!f) {
    err << "error: cannot write '" << path.string() << "'\n";
    return false;
  }
  return true;
}

std::optional<int> jobs_from_env(std::ostream& err, bool& bad) {
  bad = false;
  const char* env = std::getenv("HETERO_SPECTRA_JOBS");
  if (!env || !*env) return std::nullopt;
  char* end = nullptr;
  const long v = std::strtol(env, &end, 10);
  if (*end != '\0' || v < 1 || v > 4096) {
    err << "error: HETERO_SPECTRA_JOBS must be a positive integer, got '" << env << "'\n";
    bad = true;
    return std::nullopt;
  }
  return static_cast<int>(v);
}

}  // namespace

int cmd_solve(const SolveOptions& opts, std::ostream& out, std::ostream& err) {
  const auto method = parse_method(opts.method);
  if (!method) {
    err << "error: unknown method '" << opts.method
        << "' (expected svd, dd, hpca, dhpca, hpca_plus, rmtfa or si)\n";
    return kExitInvalid;
  }
  const bool uses_tau = method_uses_tau(*method);
  if (uses_tau && !opts.tau) {
    err << "error: --tau is required for " << opts.method << "\n";
    return kExitInvalid;
  }
  if (!uses_tau && !opts.rank) {
    err << "error: --rank is required for " << opts.method << "\n";
    return kExitInvalid;
  }
  if (uses_tau && !(*opts.tau >= 0.0)) {
    err << "error: --tau must be nonnegative\n";
    return kExitInvalid;
  }
  if (opts.max_iter < 1) {
    err << "error: --max-iter must be positive\n";
    return kExitInvalid;
  }

  ParsedMatrix parsed;
  try {
    parsed = read_matrix_file(opts.input);
  } catch (const MatrixParseError& e) {
    err << "error: " << opts.input.string() << ": " << e.what() << "\n";
    return kExitParse;
  } catch (const std::invalid_argument& e) {
    err << "error: " << opts.input.string() << ": " << e.what() << "\n";
    return kExitParse;
  }
  for (const auto& w : parsed.warnings) err << "warning: " << w << "\n";
  const SymMatrix& sigma = parsed.matrix;

  std::size_t r = 0;
  if (!uses_tau) {
    if (*opts.rank < 1 || static_cast<std::size_t>(*opts.rank) > sigma.dim()) {
      err << "error: --rank must lie in [1, " << sigma.dim() << "]\n";
      return kExitInvalid;
    }
    r = static_cast<std::size_t>(*opts.rank);
  }
  const double tau = uses_tau ? *opts.tau : 0.0;

  SolveOutcome o;
  try {
    o = solve_with(*method, sigma, tau, r, StopRule{1e-10, opts.max_iter});
  } catch (const std::exception& e) {
    err << "error: solver failed: " << e.what() << "\n";
    return kExitInvalid;
  }

  std::error_code ec;
  fs::create_directories(opts.out_dir, ec);
  if (ec) {
    err << "error: cannot create '" << opts.out_dir.string() << "': " << ec.message() << "\n";
    return kExitParse;
  }

  std::ostringstream l_csv, d_csv, trace_csv;
  write_matrix_csv(l_csv, o.L);
  write_matrix_csv(d_csv, o.D);
  trace_csv << "k,objective,fixed_point_residual,psi\n";
  for (const auto& e : o.trace.entries) {
    trace_csv << e.k << ',' << format_double(e.objective) << ','
              << format_double(e.fixed_point_residual) << ',' << format_double(e.psi) << '\n';
  }

  const double psi = psi_residual(sigma, o.L, o.D);
  const double min_diag = [&] {
    double m = INFINITY;
    for (std::size_t i = 0; i < o.D.dim(); ++i) m = std::min(m, o.D(i, i));
    return m;
  }();

  json summary;
  summary["method"] = std::string(method_tag(*method));
  if (uses_tau) {
    summary["tau"] = tau;
  } else {
    summary["rank"] = r;
  }
  summary["dimension"] = sigma.dim();
  summary["objective"] = objective_F(sigma, o.L, o.D, tau);
  summary["psi"] = psi;
  summary["nuclear_norm_L"] = nuclear_norm_sym(o.L);
  summary["rank_L"] = numerical_rank(o.L, 1e-8);
  summary["heywood"] = heywood_check(o.D);
  summary["min_diag_D"] = min_diag;
  summary["converged"] = o.trace.converged;
  summary["iterations"] = o.has_trace ? o.trace.iterations : 0;
  summary["fixed_point_residual"] =
      o.fixed_point_residual ? json(*o.fixed_point_residual) : json(nullptr);
  summary["monotone_violations"] = o.trace.monotone_violations();
  summary["warnings"] = parsed.warnings;

  const bool ok = write_file(opts.out_dir / "L.csv", l_csv.str(), err) &&
                  write_file(opts.out_dir / "D.csv", d_csv.str(), err) &&
                  write_file(opts.out_dir / "trace.csv", trace_csv.str(), err) &&
                  write_file(opts.out_dir / "summary.json", summary.dump(2) + "\n", err);
  if (!ok) return kExitParse;

  out << method_label(*method) << ": rank(L) = " << summary["rank_L"].get<std::size_t>()
      << ", psi = " << format_double(psi) << (o.trace.converged ? "" : ", NOT converged") << "\n";
  if (!o.trace.converged) {
    err << "error: solver did not converge within " << opts.max_iter
        << " iterations; outputs written\n";
    return kExitNotConverged;
  }
  return kExitOk;
}

int cmd_simulate(const SimulateOptions& opts, std::ostream& out, std::ostream& err) {
  ExperimentConfig cfg;
  try {
    cfg = read_config_file(opts.config);
    if (opts.seed) cfg.seed = *opts.seed;
    if (opts.replicates) cfg.replicates = *opts.replicates;
    cfg.record_timing = opts.timing;
    cfg.validate();
  } catch (const std::exception& e) {
    err << "error: invalid config: " << e.what() << "\n";
    return kExitInvalid;
  }
  if (opts.jobs < 1) {
    err << "error: --jobs must be positive\n";
    return kExitInvalid;
  }
  for (double v : cfg.values) {
    const ModelParams p = cfg.params_for(v, 0);
    if (p.exceeds_ledermann_bound()) {
      err << "warning: r = " << p.r << " exceeds the Ledermann bound for p = " << p.p << "\n";
    }
  }

  const auto rows = run_experiment(cfg, opts.jobs > 1 ? Schedule::parallel : Schedule::serial,
                                   opts.jobs);
  std::ostringstream csv;
  write_results_csv(csv, rows);
  if (!opts.out.parent_path().empty()) {
    std::error_code ec;
    fs::create_directories(opts.out.parent_path(), ec);
  }
  if (!write_file(opts.out, csv.str(), err)) return kExitParse;

  std::size_t failed = 0;
  for (const auto& row : rows) failed += row.status != "ok";
  out << "wrote " << rows.size() << " rows to " << opts.out.string();
  if (failed) out << " (" << failed << " with non-ok status)";
  out << "\n";
  return kExitOk;
}

int cmd_plot(const fs::path& results, const fs::path& svg_out, std::ostream& out,
             std::ostream& err) {
  std::ifstream in(results, std::ios::binary);
  if (!in) {
    err << "error: cannot open '" << results.string() << "'\n";
    return kExitParse;
  }
  PlotData data;
  try {
    data = summarize_results(read_results_csv(in));
  } catch (const ResultsFormatError& e) {
    err << "error: " << results.string() << ": " << e.what() << "\n";
    return kExitParse;
  }
  if (data.series.empty()) {
    err << "error: " << results.string() << " has no finite sin_theta values to plot\n";
    return kExitInvalid;
  }
  if (!write_file(svg_out, render_svg(data), err)) return kExitParse;
  out << "wrote " << data.series.size() << " series to " << svg_out.string() << "\n";
  return kExitOk;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Covariance decomposition with heteroskedastic noise"};
  app.name("hetero-spectra");
  app.require_subcommand(1);

  SolveOptions solve;
  std::string solve_input, solve_out;
  double tau = 0.0;
  long long rank = 0;
  auto* sub_solve = app.add_subcommand("solve", "Decompose one covariance matrix into L + D");
  sub_solve->add_option("--input", solve_input, "Symmetric matrix (dense CSV or Matrix Market array)")
      ->required();
  sub_solve->add_option("--method", solve.method, "svd, dd, hpca, dhpca, hpca_plus, rmtfa or si")
      ->required();
  auto* tau_opt = sub_solve->add_option("--tau", tau, "Shrinkage level (rmtfa, si)");
  auto* rank_opt = sub_solve->add_option("--rank", rank, "Target rank (spectral methods)");
  sub_solve->add_option("--out", solve_out, "Output directory")->required();
  sub_solve->add_option("--max-iter", solve.max_iter, "Iteration cap for rmtfa and si");

  SimulateOptions sim;
  std::string sim_config, sim_out;
  std::uint64_t seed = 0;
  int replicates = 0;
  int jobs = 0;
  auto* sub_sim = app.add_subcommand("simulate", "Run a Monte-Carlo sweep from a JSON config");
  sub_sim->add_option("--config", sim_config, "Experiment config (JSON)")->required();
  sub_sim->add_option("--out", sim_out, "Results CSV path")->required();
  auto* seed_opt = sub_sim->add_option("--seed", seed, "Override the config seed");
  auto* rep_opt = sub_sim->add_option("--replicates", replicates, "Override the replicate count");
  auto* jobs_opt = sub_sim->add_option("--jobs", jobs, "Worker threads (default $HETERO_SPECTRA_JOBS or 1)");
  sub_sim->add_flag("--timing", sim.timing, "Record wall_ms per method (output no longer byte-stable)");

  std::string plot_input, plot_out;
  auto* sub_plot = app.add_subcommand("plot", "Render mean sin theta per method as SVG");
  sub_plot->add_option("--input", plot_input, "Results CSV")->required();
  sub_plot->add_option("--out", plot_out, "SVG path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    if (auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front()) {
      err << sub->help();
    }
    return kExitInvalid;
  }

  if (sub_solve->parsed()) {
    solve.input = solve_input;
    solve.out_dir = solve_out;
    if (tau_opt->count()) solve.tau = tau;
    if (rank_opt->count()) solve.rank = rank;
    return cmd_solve(solve, out, err);
  }
  if (sub_sim->parsed()) {
    sim.config = sim_config;
    sim.out = sim_out;
    if (seed_opt->count()) sim.seed = seed;
    if (rep_opt->count()) {
      if (replicates < 1) {
        err << "error: --replicates must be positive\n";
        return kExitInvalid;
      }
      sim.replicates = replicates;
    }
    if (jobs_opt->count()) {
      sim.jobs = jobs;
    } else {
      bool bad = false;
      const auto env_jobs = jobs_from_env(err, bad);
      if (bad) return kExitInvalid;
      sim.jobs = env_jobs.value_or(1);
    }
    return cmd_simulate(sim, out, err);
  }
  return cmd_plot(plot_input, plot_out, out, err);
}

}  // namespace hs::cli
