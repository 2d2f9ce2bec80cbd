#pragma once

#include <filesystem>

#include "json.hpp"

#include "irrl/sampler.hpp"

namespace irrl {

/// One JSON header line (config echo, RNG id, version, dimension, rows), then
/// rows * dimension little-endian float64 values, row-major.
void write_trajectory(const std::filesystem::path& path, const Trajectory& traj);

struct TrajectoryFile {
  nlohmann::json header;
  Trajectory trajectory;
};

/// Throws ConfigError on a malformed or truncated file.
TrajectoryFile read_trajectory(const std::filesystem::path& path);

}  // namespace irrl
