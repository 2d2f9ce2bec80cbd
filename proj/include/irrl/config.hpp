#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "json.hpp"

#include "irrl/field.hpp"
#include "irrl/grid.hpp"
#include "irrl/ratefn.hpp"
#include "irrl/sampler.hpp"

namespace irrl {

/// Simulation experiment: one trajectory per (delta, seed) cell, estimates at each checkpoint.
struct ExperimentConfig {
  std::string potential = "quadratic";
  PotentialParams potential_params;
  DriftSpec drift;                     ///< delta is overridden per cell
  std::vector<double> deltas{0.0};
  double diffusion = 0.1;
  double dt = 1e-3;
  double t = 100.0;
  double v = 5.0;
  std::vector<double> checkpoints;     ///< empty = {t}
  int m = 0;                           ///< batch count; 0 = batch_count_schedule(t)
  double alpha = 0.05;
  std::string observable = "sumsq";
  std::vector<std::uint64_t> seeds{1};
  std::vector<double> initial;
  Integrator integrator = Integrator::euler_maruyama;
  int sweep_points = 50;
  std::filesystem::path outputs = "out";

  /// Checkpoints in increasing order, defaulting to {t}.
  std::vector<double> resolved_checkpoints() const;
  int batch_count(double checkpoint) const;
  /// Throws ConfigError on unknown names, empty lists, t <= v, checkpoints outside (v, t].
  void validate() const;
};

/// Strict parse: unknown keys and wrong types raise ConfigError.
ExperimentConfig parse_experiment_config(const nlohmann::json& j);
ExperimentConfig load_experiment_config(const std::filesystem::path& path);
nlohmann::json to_json(const ExperimentConfig& config);

/// Rate-function evaluation on a periodic grid.
struct RateConfig {
  DensitySpec density;
  std::string potential = "torus-cosine";
  PotentialParams potential_params;
  DriftSpec drift;
  double diffusion = 0.5;
  std::size_t grid = 64;
  std::size_t dims = 2;
  Discretization scheme = Discretization::spectral;
  bool compute_K = true;
  std::filesystem::path outputs = "out";
};

RateConfig parse_rate_config(const nlohmann::json& j);
nlohmann::json to_json(const RateConfig& config);

/// Circle spectral analysis: constant drift delta, observable given by Fourier name.
struct SpectralConfig {
  std::vector<double> deltas{0.0, 1.0, 2.0, 4.0};
  double diffusion = 1.0;
  std::size_t grid = 256;
  std::string observable = "cos";
  std::vector<double> ell{-0.6, -0.3, 0.3, 0.6};
  std::filesystem::path outputs = "out";
};

SpectralConfig parse_spectral_config(const nlohmann::json& j);
nlohmann::json to_json(const SpectralConfig& config);

nlohmann::json read_json_file(const std::filesystem::path& path);

SdeConfig to_sde_config(const ExperimentConfig& config, double delta, std::uint64_t seed);
nlohmann::json to_json(const SdeConfig& config);

/// Stream id of a cell: FNV-1a over the potential name and the bytes of delta.
std::uint32_t cell_stream_id(const std::string& potential, double delta);

}  // namespace irrl
