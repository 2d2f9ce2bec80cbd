#include <omp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "irrl/config.hpp"
#include "irrl/errors.hpp"
#include "irrl/estimators.hpp"
#include "irrl/experiment.hpp"
#include "irrl/grid.hpp"
#include "irrl/ratefn.hpp"
#include "irrl/spectral.hpp"
#include "irrl/trajectory_io.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace irrl;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitNumeric = 3;

struct Globals {
  std::string config;
  std::string out;
  std::vector<std::uint64_t> seeds;
  double scale = 1.0;
  int threads = 0;
};

ExperimentConfig experiment_from(const Globals& g) {
  if (g.config.empty()) throw ConfigError("--config is required");
  ExperimentConfig c = load_experiment_config(g.config);
  if (!g.seeds.empty()) c.seeds = g.seeds;
  if (!g.out.empty()) c.outputs = g.out;
  c.validate();
  return c;
}

fs::path out_dir(const Globals& g, const fs::path& fallback) {
  fs::path dir = g.out.empty() ? fallback : fs::path(g.out);
  ensure_output_dir(dir);
  return dir;
}

void report_failures(const std::vector<CellFailure>& failures) {
  for (const CellFailure& f : failures)
    std::cerr << "warning: cell delta=" << format_double(f.delta) << " seed=" << f.seed
              << " failed at step " << f.step << ": " << f.message << '\n';
}

struct SimulateArgs {
  std::string save_path;
  std::optional<double> delta;
  std::optional<std::uint64_t> seed;
};

void cmd_simulate(const Globals& g, const SimulateArgs& a) {
  const ExperimentConfig c = experiment_from(g);
  const double delta = a.delta.value_or(c.deltas.front());
  const std::uint64_t seed = a.seed.value_or(c.seeds.front());
  const fs::path dir = out_dir(g, c.outputs);
  const fs::path path = a.save_path.empty() ? dir / "trajectory.bin" : fs::path(a.save_path);
  const Trajectory traj = simulate(to_sde_config(c, delta, seed));
  write_trajectory(path, traj);
  write_json(dir / "manifest.json", make_manifest("simulate", to_json(c), {}));
  std::cout << "wrote " << traj.size() << " states of dimension " << traj.dimension() << " to "
            << path.string() << '\n';
}

struct EstimateArgs {
  std::string trajectory;
  std::string observable = "sumsq";
  double v = 5.0;
  int m = 0;
  double alpha = 0.05;
};

void cmd_estimate(const Globals& g, const EstimateArgs& a) {
  if (!a.trajectory.empty()) {
    const TrajectoryFile file = read_trajectory(a.trajectory);
    const Trajectory& traj = file.trajectory;
    const TimeSeries series = traj.observe(make_observable(a.observable));
    const int m = a.m > 0 ? a.m : batch_count_schedule(series.duration());
    const BatchMeansReport r = batch_means(series, m, a.alpha, a.v);
    EstimateRow row;
    row.potential = traj.config().potential;
    row.delta = traj.config().drift.delta;
    row.diffusion = traj.config().diffusion;
    row.dt = series.dt;
    row.t = series.duration();
    row.v = a.v;
    row.m = m;
    row.estimate = r.estimate;
    row.s2m = r.s2m;
    row.ci_lower = r.ci_lower;
    row.ci_upper = r.ci_upper;
    row.sigma2_batch = r.asymptotic_variance();
    row.sigma2_autocov = asymptotic_variance_estimate(series, m, a.v, VarianceMethod::autocov);
    row.seed = traj.config().seed;
    const fs::path dir = out_dir(g, "out");
    write_estimates_csv(dir / "estimates.csv", {row});
    write_json(dir / "manifest.json",
               make_manifest("estimate", {{"trajectory", file.header}, {"observable", a.observable},
                                          {"v", a.v}, {"m", m}, {"alpha", a.alpha}},
                             {}));
    std::cout << "estimate " << format_double(r.estimate) << " ci [" << format_double(r.ci_lower)
              << ", " << format_double(r.ci_upper) << "]\n";
    return;
  }
  const ExperimentConfig c = experiment_from(g);
  const fs::path dir = out_dir(g, c.outputs);
  const ExperimentResult result = run_experiment(c);
  write_estimates_csv(dir / "estimates.csv", result.rows);
  write_json(dir / "manifest.json", make_manifest("estimate", to_json(c), result.failures));
  report_failures(result.failures);
  std::cout << "wrote " << result.rows.size() << " rows to " << (dir / "estimates.csv").string()
            << '\n';
}

struct RateArgs {
  std::optional<std::string> density;
  std::optional<std::string> density_file;
  std::optional<std::string> potential;
  std::optional<std::string> drift;
  std::optional<double> delta;
  std::optional<double> diffusion;
  std::optional<std::size_t> grid;
  std::optional<std::size_t> dims;
  std::optional<std::string> scheme;
  std::optional<double> shift;
  std::optional<double> kappa;
  std::optional<std::uint64_t> seed;
  bool no_K = false;
};

void cmd_ratefn(const Globals& g, const RateArgs& a) {
  json j = g.config.empty() ? json::object() : read_json_file(g.config);
  if (a.dims) {
    j["dims"] = *a.dims;
    if (*a.dims == 1 && !j.contains("potential") && !a.potential) {
      j["potential"] = "flat";
      if (!a.drift) j["drift"]["kind"] = "constant";
    }
  }
  if (a.potential) j["potential"] = *a.potential;
  if (a.drift) j["drift"]["kind"] = *a.drift;
  if (a.delta) j["drift"]["delta"] = *a.delta;
  if (a.diffusion) j["D"] = *a.diffusion;
  if (a.grid) j["grid"] = *a.grid;
  if (a.scheme) j["scheme"] = *a.scheme;
  if (a.no_K) j["compute_K"] = false;
  if (a.density || a.density_file || a.shift || a.kappa || a.seed) {
    if (!j.contains("density") || j["density"].is_string())
      j["density"] = {{"name", j.value("density", std::string("uniform"))}};
    if (a.density) j["density"]["name"] = *a.density;
    if (a.density_file) {
      j["density"]["name"] = "file";
      j["density"]["path"] = *a.density_file;
    }
    if (a.shift) j["density"]["shift"] = *a.shift;
    if (a.kappa) j["density"]["kappa"] = *a.kappa;
    if (a.seed) j["density"]["seed"] = *a.seed;
  }
  const RateConfig c = parse_rate_config(j);
  const PotentialField u = make_potential(c.potential, c.potential_params);
  const int dims = static_cast<int>(c.dims);
  if (u.dimension() != c.dims) throw ConfigError("potential dimension does not match dims");
  const PeriodicGrid grid =
      c.density.name == "file"
          ? grid_for_count(read_node_values(c.density.path).size(), dims)
          : PeriodicGrid(dims, c.grid);
  const GridDensity p = make_density(c.density, grid);
  const DriftField drift = build_drift(c.drift, u);
  RateOptions opts;
  opts.compute_K = c.compute_K;
  const RateReport r = rate_irreversible(p, u, drift, c.diffusion, c.scheme, opts);

  json report = {{"I0", r.I0},
                 {"J_C", r.J_C},
                 {"I_C", r.I_C},
                 {"gartner", r.gartner},
                 {"three_term", r.three_term},
                 {"mismatch", r.mismatch},
                 {"K", r.has_K ? json(r.K) : json(nullptr)},
                 {"residual_psi", r.residual_psi},
                 {"residual_xi", r.residual_xi},
                 {"iterations", r.iterations},
                 {"max_div_pc", r.max_div_pc},
                 {"invariance_residual", r.invariance_residual},
                 {"D", r.diffusion},
                 {"delta", r.delta},
                 {"grid", grid.n},
                 {"dims", dims},
                 {"scheme", to_string(r.scheme)}};
  const fs::path dir = out_dir(g, c.outputs);
  write_json(dir / "ratefn.json", report);
  {
    std::ofstream csv(dir / "ratefn.csv", std::ios::binary | std::ios::trunc);
    if (!csv) throw ConfigError("cannot write ratefn.csv");
    csv << "density,scheme,dims,grid,D,delta,I0,J_C,I_C,K,mismatch,residual_psi,iterations\n"
        << c.density.name << ',' << to_string(r.scheme) << ',' << dims << ',' << grid.n << ','
        << format_double(r.diffusion) << ',' << format_double(r.delta) << ','
        << format_double(r.I0) << ',' << format_double(r.J_C) << ',' << format_double(r.I_C)
        << ',' << (r.has_K ? format_double(r.K) : std::string("nan")) << ','
        << format_double(r.mismatch) << ',' << format_double(r.residual_psi) << ','
        << r.iterations << '\n';
  }
  write_json(dir / "manifest.json", make_manifest("ratefn", to_json(c), {}));
  if (r.invariance_residual > 1e-6)
    std::cerr << "warning: drift does not preserve the Gibbs measure (residual "
              << format_double(r.invariance_residual) << ")\n";
  std::cout << report.dump(2) << '\n';
}

struct SpectralArgs {
  std::vector<double> deltas;
  std::optional<double> diffusion;
  std::optional<std::size_t> grid;
  std::optional<std::string> observable;
  std::vector<double> ell;
};

void cmd_spectral(const Globals& g, const SpectralArgs& a) {
  json j = g.config.empty() ? json::object() : read_json_file(g.config);
  if (!a.deltas.empty()) j["delta"] = a.deltas;
  if (a.diffusion) j["D"] = *a.diffusion;
  if (a.grid) j["grid"] = *a.grid;
  if (a.observable) j["observable"] = *a.observable;
  if (!a.ell.empty()) j["ell"] = a.ell;
  const SpectralConfig c = parse_spectral_config(j);
  const FourierObservable f = FourierObservable::from_name(c.observable);
  const std::vector<double> samples = f.sample(c.grid);
  const fs::path dir = out_dir(g, c.outputs);
  std::ofstream rate(dir / "spectral_rate.csv", std::ios::binary | std::ios::trunc);
  std::ofstream sig(dir / "spectral_sigma2.csv", std::ios::binary | std::ios::trunc);
  if (!rate || !sig) throw ConfigError("cannot write spectral output files");
  rate << "delta,D,ell,rate\n";
  sig << "delta,D,sigma2_fourier,sigma2_curvature\n";
  for (double delta : c.deltas) {
    const std::vector<RatePoint> curve = observable_rate(samples, delta, c.diffusion, c.ell);
    for (const RatePoint& pt : curve)
      rate << format_double(delta) << ',' << format_double(c.diffusion) << ','
           << format_double(pt.ell) << ',' << format_double(pt.rate) << '\n';
    const Curvature k = rate_curvature(samples, delta, c.diffusion);
    sig << format_double(delta) << ',' << format_double(c.diffusion) << ','
        << format_double(fourier_sigma2(f, delta, c.diffusion)) << ','
        << format_double(k.implied_sigma2) << '\n';
  }
  write_json(dir / "manifest.json", make_manifest("spectral", to_json(c), {}));
  std::cout << "wrote " << (dir / "spectral_rate.csv").string() << " and "
            << (dir / "spectral_sigma2.csv").string() << '\n';
}

void cmd_sweep(const Globals& g) {
  const ExperimentConfig c = experiment_from(g);
  const fs::path dir = out_dir(g, c.outputs);
  const SweepResult result = sweep(c);
  for (const SweepSeries& s : result.series)
    write_sweep_csv(dir / ("sweep_seed" + std::to_string(s.seed) + ".csv"), s.rows);
  write_json(dir / "manifest.json", make_manifest("sweep", to_json(c), result.failures));
  report_failures(result.failures);
  std::cout << "wrote " << result.series.size() << " sweep files to " << dir.string() << '\n';
}

void cmd_reproduce(const Globals& g, int table) {
  std::vector<std::uint64_t> seeds = g.seeds;
  if (seeds.empty()) seeds = {1, 2, 3, 4, 5};
  const fs::path dir = out_dir(g, "out");
  const TableComparison cmp = reproduce_table(table, g.scale, seeds);
  const std::string stem = "table" + std::to_string(table);
  write_table_csv(dir / (stem + ".csv"), cmp);
  write_estimates_csv(dir / (stem + "_runs.csv"), cmp.runs);
  json cfg = to_json(table_config(table, g.scale, seeds));
  cfg["table"] = table;
  cfg["scale"] = g.scale;
  write_json(dir / "manifest.json", make_manifest("reproduce-table", cfg, cmp.failures));
  report_failures(cmp.failures);
  std::printf("%-8s %-8s %-12s %-12s %-10s %-10s %s\n", "delta", "t", "printed", "measured",
              "printed_r", "meas_r", "check");
  for (const TableCell& c : cmp.cells)
    std::printf("%-8g %-8g %-12.4g %-12.4g %-10.3g %-10.3g %s\n", c.delta, c.t, c.printed_value,
                c.measured_value, c.printed_ratio, c.measured_ratio,
                c.delta == 0.0 ? "-" : (c.ratio_check ? "ok" : "outside"));
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Irreversible Langevin samplers: simulation, estimators, rate functions"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config, "JSON config file");
  app.add_option("--out", g.out, "output directory");
  app.add_option("--seeds", g.seeds, "comma-separated seed list")->delimiter(',');
  app.add_option("--scale", g.scale, "horizon scale for reproduce-table")
      ->check(CLI::Range(1e-6, 1.0));
  app.add_option("--threads", g.threads, "OpenMP thread count")->check(CLI::NonNegativeNumber);

  SimulateArgs sim;
  auto* simulate_cmd = app.add_subcommand("simulate", "simulate one trajectory and save it");
  simulate_cmd->add_option("--save-path", sim.save_path, "trajectory output file");
  simulate_cmd->add_option("--delta", sim.delta, "drift strength (default: first config delta)");
  simulate_cmd->add_option("--seed", sim.seed, "seed (default: first config seed)");

  EstimateArgs est;
  auto* estimate_cmd = app.add_subcommand("estimate", "batch-means estimates per cell");
  estimate_cmd->add_option("--trajectory", est.trajectory, "saved trajectory to estimate from");
  estimate_cmd->add_option("--observable", est.observable, "sumsq | cos | x");
  estimate_cmd->add_option("--v", est.v, "burn-in");
  estimate_cmd->add_option("--m", est.m, "batch count (default: schedule)");
  estimate_cmd->add_option("--alpha", est.alpha, "CI level");

  RateArgs rate;
  auto* rate_cmd = app.add_subcommand("ratefn", "Donsker-Varadhan rate of a grid density");
  rate_cmd->add_option("--density", rate.density, "builtin density name");
  rate_cmd->add_option("--density-file", rate.density_file, "node values, one per line");
  rate_cmd->add_option("--potential", rate.potential, "potential name");
  rate_cmd->add_option("--drift", rate.drift, "rotational | constant");
  rate_cmd->add_option("--delta", rate.delta, "drift strength");
  rate_cmd->add_option("--D", rate.diffusion, "diffusion coefficient");
  rate_cmd->add_option("--grid", rate.grid, "nodes per axis");
  rate_cmd->add_option("--dims", rate.dims, "1 or 2");
  rate_cmd->add_option("--scheme", rate.scheme, "spectral | finite-volume");
  rate_cmd->add_option("--shift", rate.shift, "shifted-gibbs shift");
  rate_cmd->add_option("--kappa", rate.kappa, "function-of-u exponent");
  rate_cmd->add_option("--density-seed", rate.seed, "random-smooth seed");
  rate_cmd->add_flag("--no-K", rate.no_K, "skip the quadratic coefficient");

  SpectralArgs spec;
  auto* spectral_cmd = app.add_subcommand("spectral", "circle generator spectrum and rates");
  spectral_cmd->add_option("--delta", spec.deltas, "drift strengths")->delimiter(',');
  spectral_cmd->add_option("--D", spec.diffusion, "diffusion coefficient");
  spectral_cmd->add_option("--grid", spec.grid, "grid size");
  spectral_cmd->add_option("--observable", spec.observable, "cos | cos2 | cos+cos2");
  spectral_cmd->add_option("--ell", spec.ell, "rate-function levels")->delimiter(',');

  auto* sweep_cmd = app.add_subcommand("sweep", "CI time series per delta and seed");

  int table = 0;
  auto* table_cmd = app.add_subcommand("reproduce-table", "variance tables 1-3");
  table_cmd->add_option("--table", table, "1, 2 or 3")->required()->check(CLI::Range(1, 3));

  for (CLI::App* sub : app.get_subcommands({})) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (g.threads > 0) omp_set_num_threads(g.threads);

  try {
    if (*simulate_cmd) cmd_simulate(g, sim);
    if (*estimate_cmd) cmd_estimate(g, est);
    if (*rate_cmd) cmd_ratefn(g, rate);
    if (*spectral_cmd) cmd_spectral(g, spec);
    if (*sweep_cmd) cmd_sweep(g);
    if (*table_cmd) cmd_reproduce(g, table);
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const ParameterError& e) {
    std::cerr << "parameter error: " << e.what() << '\n';
    return kExitConfig;
  } catch (const NumericError& e) {
    std::cerr << "numeric failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const SolverError& e) {
    std::cerr << "solver failure: " << e.what() << '\n';
    return kExitNumeric;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kExitConfig;
  }
  return 0;
}
