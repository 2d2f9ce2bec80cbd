#include "irrl/experiment.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <ctime>
#include <exception>
#include <fstream>
#include <limits>
#include <optional>
#include <system_error>

#include "irrl/errors.hpp"
#include "irrl/estimators.hpp"
#include "irrl/rng.hpp"

namespace irrl {

using nlohmann::json;

namespace {

struct CellOutcome {
  std::optional<TimeSeries> series;
  std::optional<CellFailure> failure;
};

/// Simulates every (delta, seed) cell; outcome index = delta index * seeds + seed index.
std::vector<CellOutcome> run_cells(const ExperimentConfig& config, Execution exec) {
  const std::size_t ns = config.seeds.size();
  const std::size_t cells = config.deltas.size() * ns;
  const Observable f = make_observable(config.observable);
  std::vector<CellOutcome> out(cells);
  std::vector<std::exception_ptr> errors(cells);
  auto run = [&](std::size_t k) {
    const double delta = config.deltas[k / ns];
    const std::uint64_t seed = config.seeds[k % ns];
    try {
      out[k].series = simulate_observable(to_sde_config(config, delta, seed), f);
    } catch (const NumericError& e) {
      out[k].failure = CellFailure{delta, seed, e.index(), e.what()};
    } catch (...) {
      errors[k] = std::current_exception();
    }
  };
  if (exec == Execution::parallel) {
    const long n = static_cast<long>(cells);
#pragma omp parallel for schedule(dynamic, 1)
    for (long k = 0; k < n; ++k) run(static_cast<std::size_t>(k));
  } else {
    for (std::size_t k = 0; k < cells; ++k) run(k);
  }
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

double median(std::vector<double> xs) {
  if (xs.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(xs.begin(), xs.end());
  const std::size_t n = xs.size();
  return n % 2 ? xs[n / 2] : 0.5 * (xs[n / 2 - 1] + xs[n / 2]);
}

void open_or_throw(std::ofstream& out, const std::filesystem::path& path) {
  out.open(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
}

}  // namespace

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

ExperimentResult run_experiment(const ExperimentConfig& config, Execution exec) {
  config.validate();
  const std::vector<CellOutcome> cells = run_cells(config, exec);
  const std::vector<double> checkpoints = config.resolved_checkpoints();
  const std::size_t ns = config.seeds.size();
  ExperimentResult result;
  for (const CellOutcome& c : cells)
    if (c.failure) result.failures.push_back(*c.failure);
  for (std::size_t di = 0; di < config.deltas.size(); ++di) {
    for (double tc : checkpoints) {
      const int m = config.batch_count(tc);
      for (std::size_t si = 0; si < ns; ++si) {
        const CellOutcome& cell = cells[di * ns + si];
        if (!cell.series) continue;
        const TimeSeries prefix = cell.series->prefix(tc);
        const BatchMeansReport r = batch_means(prefix, m, config.alpha, config.v);
        EstimateRow row;
        row.potential = config.potential;
        row.delta = config.deltas[di];
        row.diffusion = config.diffusion;
        row.dt = config.dt;
        row.t = tc;
        row.v = config.v;
        row.m = m;
        row.estimate = r.estimate;
        row.s2m = r.s2m;
        row.ci_lower = r.ci_lower;
        row.ci_upper = r.ci_upper;
        row.sigma2_batch = r.asymptotic_variance();
        row.sigma2_autocov =
            asymptotic_variance_estimate(prefix, m, config.v, VarianceMethod::autocov);
        row.seed = config.seeds[si];
        result.rows.push_back(std::move(row));
      }
    }
  }
  return result;
}

SweepResult sweep(const ExperimentConfig& config, Execution exec) {
  config.validate();
  const std::vector<CellOutcome> cells = run_cells(config, exec);
  const std::size_t ns = config.seeds.size();
  SweepResult result;
  for (const CellOutcome& c : cells)
    if (c.failure) result.failures.push_back(*c.failure);
  for (std::size_t si = 0; si < ns; ++si) {
    SweepSeries s;
    s.seed = config.seeds[si];
    for (std::size_t di = 0; di < config.deltas.size(); ++di) {
      const CellOutcome& cell = cells[di * ns + si];
      if (!cell.series) continue;
      for (int k = 1; k <= config.sweep_points; ++k) {
        const double tk = config.v + (config.t - config.v) * k / config.sweep_points;
        const BatchMeansReport r =
            batch_means(cell.series->prefix(tk), config.batch_count(tk), config.alpha, config.v);
        s.rows.push_back({config.deltas[di], tk, r.estimate, r.ci_lower, r.ci_upper});
      }
    }
    result.series.push_back(std::move(s));
  }
  return result;
}

const PrintedTable& printed_table(int table_id) {
  static const PrintedTable tables[3] = {
      {1,
       "bimodal1",
       {0.0, 10.0, 100.0},
       {25.0, 100.0, 160.0, 220.0, 295.0},
       {{0.22, 0.08, 0.038, 0.029, 0.011},
        {0.19, 0.01, 0.007, 0.005, 0.002},
        {0.09, 0.001, 3e-4, 2.8e-4, 1.3e-4}}},
      {2,
       "bimodal2",
       {0.0, 10.0},
       {100.0, 200.0, 300.0, 400.0, 500.0, 600.0, 700.0},
       {{0.01, 0.006, 0.002, 0.002, 0.002, 0.003, 0.002},
        {0.003, 0.0007, 0.0002, 0.0001, 7e-5, 6e-5, 6e-5}}},
      {3,
       "threewell",
       {0.0, 10.0},
       {100.0, 200.0, 300.0, 400.0, 500.0, 600.0, 700.0},
       {{0.004, 0.002, 0.002, 0.001, 0.001, 0.001, 0.001},
        {0.001, 0.0003, 0.0002, 0.0001, 0.0001, 0.0001, 0.0001}}},
  };
  if (table_id < 1 || table_id > 3) throw ParameterError("table id must be 1, 2 or 3");
  return tables[table_id - 1];
}

const TableCell& TableComparison::cell(double delta, double t) const {
  for (const TableCell& c : cells)
    if (c.delta == delta && c.t == t) return c;
  throw ParameterError("table cell not present");
}

ExperimentConfig table_config(int table_id, double scale, std::vector<std::uint64_t> seeds) {
  const PrintedTable& table = printed_table(table_id);
  if (!(scale > 0.0 && scale <= 1.0)) throw ParameterError("scale must lie in (0, 1]");
  ExperimentConfig c;
  c.potential = table.potential;
  c.drift.kind = "rotational";
  c.deltas = table.deltas;
  c.diffusion = 0.1;
  c.dt = 1e-3;
  c.v = 5.0;
  c.observable = "sumsq";
  c.seeds = std::move(seeds);
  c.integrator = Integrator::rk4_split;
  for (double t : table.times)
    if (t * scale > c.v) c.checkpoints.push_back(t * scale);
  if (c.checkpoints.empty()) throw ParameterError("scale leaves no horizon beyond the burn-in");
  c.t = c.checkpoints.back();
  return c;
}

TableComparison reproduce_table(int table_id, double scale, std::vector<std::uint64_t> seeds,
                                Execution exec) {
  const PrintedTable& table = printed_table(table_id);
  const ExperimentConfig config = table_config(table_id, scale, seeds);
  const ExperimentResult runs = run_experiment(config, exec);

  TableComparison out;
  out.table_id = table_id;
  out.scale = scale;
  out.seeds = config.seeds;
  out.failures = runs.failures;

  std::vector<std::vector<double>> measured(table.deltas.size(),
                                            std::vector<double>(table.times.size()));
  std::vector<std::vector<std::size_t>> used(table.deltas.size(),
                                             std::vector<std::size_t>(table.times.size()));
  for (std::size_t di = 0; di < table.deltas.size(); ++di) {
    for (std::size_t ti = 0; ti < table.times.size(); ++ti) {
      const double ts = table.times[ti] * scale;
      std::vector<double> vars;
      for (const EstimateRow& r : runs.rows)
        if (r.delta == table.deltas[di] && r.t == ts) vars.push_back(r.s2m / r.m);
      used[di][ti] = vars.size();
      measured[di][ti] = median(std::move(vars));
    }
  }
  for (std::size_t di = 0; di < table.deltas.size(); ++di) {
    for (std::size_t ti = 0; ti < table.times.size(); ++ti) {
      const double ts = table.times[ti] * scale;
      if (!(ts > config.v)) continue;
      TableCell c;
      c.delta = table.deltas[di];
      c.t = table.times[ti];
      c.scaled_t = ts;
      c.printed_value = table.values[di][ti];
      c.measured_value = measured[di][ti];
      c.printed_ratio = table.values[0][ti] / table.values[di][ti];
      c.measured_ratio = measured[0][ti] / measured[di][ti];
      c.seeds_used = used[di][ti];
      c.ratio_check = std::isfinite(c.measured_ratio) && c.measured_ratio >= c.printed_ratio / 3.0 &&
                      c.measured_ratio <= c.printed_ratio * 3.0;
      out.cells.push_back(c);
    }
  }
  out.runs = runs.rows;
  return out;
}

void write_estimates_csv(const std::filesystem::path& path, const std::vector<EstimateRow>& rows) {
  std::ofstream out;
  open_or_throw(out, path);
  out << "potential,delta,D,dt,t,v,m,estimate,s2m,ci_lo,ci_hi,sigma2_batch,sigma2_autocov,seed\n";
  for (const EstimateRow& r : rows) {
    out << r.potential << ',' << format_double(r.delta) << ',' << format_double(r.diffusion) << ','
        << format_double(r.dt) << ',' << format_double(r.t) << ',' << format_double(r.v) << ','
        << r.m << ',' << format_double(r.estimate) << ',' << format_double(r.s2m) << ','
        << format_double(r.ci_lower) << ',' << format_double(r.ci_upper) << ','
        << format_double(r.sigma2_batch) << ',' << format_double(r.sigma2_autocov) << ','
        << r.seed << '\n';
  }
}

void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows) {
  std::ofstream out;
  open_or_throw(out, path);
  out << "delta,t,estimate,ci_lo,ci_hi\n";
  for (const SweepRow& r : rows)
    out << format_double(r.delta) << ',' << format_double(r.t) << ',' << format_double(r.estimate)
        << ',' << format_double(r.ci_lower) << ',' << format_double(r.ci_upper) << '\n';
}

void write_table_csv(const std::filesystem::path& path, const TableComparison& table) {
  std::ofstream out;
  open_or_throw(out, path);
  out << "table,delta,t,scaled_t,printed_value,measured_value,printed_ratio,measured_ratio,"
         "ratio_check,seeds\n";
  for (const TableCell& c : table.cells)
    out << table.table_id << ',' << format_double(c.delta) << ',' << format_double(c.t) << ','
        << format_double(c.scaled_t) << ',' << format_double(c.printed_value) << ','
        << format_double(c.measured_value) << ',' << format_double(c.printed_ratio) << ','
        << format_double(c.measured_ratio) << ',' << (c.ratio_check ? "true" : "false") << ','
        << c.seeds_used << '\n';
}

json make_manifest(const std::string& command, const json& config,
                   const std::vector<CellFailure>& failures) {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  char stamp[32];
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::strftime(stamp, sizeof stamp, "%Y-%m-%dT%H:%M:%SZ", &tm);
  json f = json::array();
  for (const CellFailure& c : failures)
    f.push_back({{"delta", c.delta}, {"seed", c.seed}, {"step", c.step}, {"message", c.message}});
  return {{"command", command},
          {"version", std::string(version)},
          {"rng", std::string(NormalStream::algorithm_id)},
          {"timestamp", stamp},
          {"config", config},
          {"failures", f}};
}

void write_json(const std::filesystem::path& path, const json& j) {
  std::ofstream out;
  open_or_throw(out, path);
  out << j.dump(2) << '\n';
}

void ensure_output_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec || !std::filesystem::is_directory(dir))
    throw ConfigError("cannot create output directory '" + dir.string() + "'");
}

}  // namespace irrl
