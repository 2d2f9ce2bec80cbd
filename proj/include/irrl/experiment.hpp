#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "irrl/config.hpp"
#include "irrl/spectral.hpp"

namespace irrl {

inline constexpr std::string_view version = "0.1.0";

/// One estimator row per (delta, checkpoint, seed).
struct EstimateRow {
  std::string potential;
  double delta = 0.0;
  double diffusion = 0.0;
  double dt = 0.0;
  double t = 0.0;
  double v = 0.0;
  int m = 0;
  double estimate = 0.0;
  double s2m = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  double sigma2_batch = 0.0;
  double sigma2_autocov = 0.0;
  std::uint64_t seed = 0;
};

/// A cell whose trajectory blew up; the run continues without it.
struct CellFailure {
  double delta = 0.0;
  std::uint64_t seed = 0;
  std::size_t step = 0;
  std::string message;
};

struct ExperimentResult {
  std::vector<EstimateRow> rows;  ///< ordered by delta, checkpoint, seed
  std::vector<CellFailure> failures;
};

ExperimentResult run_experiment(const ExperimentConfig& config,
                                Execution exec = Execution::parallel);

struct SweepRow {
  double delta = 0.0;
  double t = 0.0;
  double estimate = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
};

struct SweepSeries {
  std::uint64_t seed = 0;
  std::vector<SweepRow> rows;  ///< ordered by delta, then t
};

struct SweepResult {
  std::vector<SweepSeries> series;  ///< one per seed, in config order
  std::vector<CellFailure> failures;
};

/// CI time series at sweep_points equally spaced times in (v, t].
SweepResult sweep(const ExperimentConfig& config, Execution exec = Execution::parallel);

struct PrintedTable {
  int id = 0;
  std::string potential;
  std::vector<double> deltas;
  std::vector<double> times;
  std::vector<std::vector<double>> values;  ///< values[delta][t]
};

/// Printed variance tables 1-3.
const PrintedTable& printed_table(int table_id);

struct TableCell {
  double delta = 0.0;
  double t = 0.0;         ///< printed horizon
  double scaled_t = 0.0;  ///< horizon actually simulated
  double printed_value = 0.0;
  double measured_value = 0.0;  ///< median over seeds of s2m / m
  double printed_ratio = 1.0;   ///< var(delta = 0) / var(delta) at this t
  double measured_ratio = 1.0;
  bool ratio_check = false;     ///< measured ratio within a factor 3 of the printed ratio
  std::size_t seeds_used = 0;
};

struct TableComparison {
  int table_id = 0;
  double scale = 1.0;
  std::vector<std::uint64_t> seeds;
  std::vector<TableCell> cells;  ///< ordered by delta, then t
  std::vector<EstimateRow> runs;
  std::vector<CellFailure> failures;

  const TableCell& cell(double delta, double t) const;
};

/// Simulation setup shared by the tables: D = 0.1, dt = 1e-3, v = 5, f = |z|^2,
/// C0 = J grad U, rk4-split integrator.
ExperimentConfig table_config(int table_id, double scale, std::vector<std::uint64_t> seeds);

TableComparison reproduce_table(int table_id, double scale, std::vector<std::uint64_t> seeds,
                                Execution exec = Execution::parallel);

void write_estimates_csv(const std::filesystem::path& path, const std::vector<EstimateRow>& rows);
void write_sweep_csv(const std::filesystem::path& path, const std::vector<SweepRow>& rows);
void write_table_csv(const std::filesystem::path& path, const TableComparison& table);

/// Config echo, code version, RNG id, timestamp and failures.
nlohmann::json make_manifest(const std::string& command, const nlohmann::json& config,
                             const std::vector<CellFailure>& failures);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

/// Creates the directory; ConfigError when it cannot be created or written.
void ensure_output_dir(const std::filesystem::path& dir);

/// Shortest round-trip decimal form, used in every data file.
std::string format_double(double x);

}  // namespace irrl
