#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "irrl/field.hpp"

namespace irrl {

/// Uniform periodic grid of n^dims nodes on [0, period)^dims, row-major with
/// the first axis slowest. Node (i, j) sits at (i h, j h).
struct PeriodicGrid {
  int dims = 1;
  std::size_t n = 64;
  double period = 6.283185307179586;

  PeriodicGrid() = default;
  PeriodicGrid(int dims, std::size_t n, double period = 6.283185307179586);

  std::size_t size() const noexcept { return dims == 1 ? n : n * n; }
  double h() const noexcept { return period / static_cast<double>(n); }
  /// Coordinates of node idx shifted by `offset` grid spacings along axis `axis`
  /// (axis < 0: no shift).
  void point(std::size_t idx, std::span<double> out, int axis = -1, double offset = 0.0) const;
  std::vector<double> point(std::size_t idx) const;

  /// f sampled at every node.
  std::vector<double> sample(const std::function<double(std::span<const double>)>& f) const;
};

/// Strictly positive density on a periodic grid, taken with respect to the
/// normalized Lebesgue measure of the torus: the node mean equals 1.
class GridDensity {
 public:
  /// Throws ParameterError on a non-positive or non-finite value. Values are
  /// rescaled to mean 1 unless `normalize` is false, in which case the mean
  /// must already be 1 within 1e-12.
  GridDensity(PeriodicGrid grid, std::vector<double> values, bool normalize = true);

  const PeriodicGrid& grid() const noexcept { return grid_; }
  const std::vector<double>& values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const noexcept { return values_[i]; }

  /// int g dmu  =  mean over nodes of g p.
  double integrate(std::span<const double> g) const;
  double min() const;

 private:
  PeriodicGrid grid_;
  std::vector<double> values_;
};

/// Parameters of the builtin densities; see make_density.
struct DensitySpec {
  std::string name = "uniform";
  std::string potential = "torus-cosine";
  PotentialParams potential_params;
  double diffusion = 0.5;  ///< gibbs: p ~ exp(-U/D)
  double kappa = 4.0;      ///< function-of-u: p ~ exp(-kappa U)
  double shift = 1.0;      ///< shifted-gibbs: p ~ exp(-U(x - shift, y)/D)
  double amplitude = 0.5;  ///< cosine: p = 1 + a cos x
  double coefficient_scale = 1.0;  ///< random-smooth: coefficients scale * U(-1, 1) / sqrt(M)
  std::uint64_t seed = 1;  ///< random-smooth
  std::string path;        ///< file: one value per line, row-major
};

/// Builtin densities:
///   uniform         p = 1
///   gibbs           p ~ exp(-U/D)
///   function-of-u   p ~ exp(-kappa U)
///   shifted-gibbs   p ~ exp(-U(x - shift, y, ...)/D)
///   cosine          p = 1 + a cos x  (1D)
///   random-smooth   p ~ exp(g), g a random Fourier series over the M modes
///                   0 < |k|_inf <= 4 of a half plane (M = 4 in 1D, 40 in 2D),
///                   cos and sin coefficients coefficient_scale * U(-1, 1) / sqrt(M)
///   file            node values read from `path`
GridDensity make_density(const DensitySpec& spec, const PeriodicGrid& grid);

/// Plain text, one value per line (blank lines and '#' comments skipped).
std::vector<double> read_node_values(const std::string& path);

/// Grid of the right dimension for a value count: n for 1D, n*n for 2D.
PeriodicGrid grid_for_count(std::size_t count, int dims, double period = 6.283185307179586);

}  // namespace irrl
