#include "irrl/grid.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include "irrl/errors.hpp"

namespace irrl {

PeriodicGrid::PeriodicGrid(int d, std::size_t nodes, double len) : dims(d), n(nodes), period(len) {
  if (dims != 1 && dims != 2) throw ParameterError("grids are 1D or 2D");
  if (n < 4) throw ParameterError("grid needs at least 4 nodes per axis");
  if (!(period > 0.0)) throw ParameterError("grid period must be positive");
}

void PeriodicGrid::point(std::size_t idx, std::span<double> out, int axis, double offset) const {
  const double hh = h();
  if (dims == 1) {
    out[0] = static_cast<double>(idx) * hh;
  } else {
    out[0] = static_cast<double>(idx / n) * hh;
    out[1] = static_cast<double>(idx % n) * hh;
  }
  if (axis >= 0) out[static_cast<std::size_t>(axis)] += offset * hh;
}

std::vector<double> PeriodicGrid::point(std::size_t idx) const {
  std::vector<double> x(static_cast<std::size_t>(dims));
  point(idx, x);
  return x;
}

std::vector<double> PeriodicGrid::sample(
    const std::function<double(std::span<const double>)>& f) const {
  std::vector<double> out(size());
  std::vector<double> x(static_cast<std::size_t>(dims));
  for (std::size_t i = 0; i < out.size(); ++i) {
    point(i, x);
    out[i] = f(x);
  }
  return out;
}

GridDensity::GridDensity(PeriodicGrid grid, std::vector<double> values, bool normalize)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.size()) throw ParameterError("density size does not match the grid");
  for (std::size_t i = 0; i < values_.size(); ++i)
    if (!(values_[i] > 0.0) || !std::isfinite(values_[i]))
      throw ParameterError("density must be strictly positive and finite (node " +
                           std::to_string(i) + ")");
  const double mean =
      std::accumulate(values_.begin(), values_.end(), 0.0) / static_cast<double>(values_.size());
  if (normalize) {
    for (double& v : values_) v /= mean;
  } else if (std::fabs(mean - 1.0) > 1e-12) {
    throw ParameterError("density is not normalized");
  }
}

double GridDensity::integrate(std::span<const double> g) const {
  if (g.size() != values_.size()) throw ParameterError("integrand size does not match the grid");
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) s += g[i] * values_[i];
  return s / static_cast<double>(g.size());
}

double GridDensity::min() const { return *std::min_element(values_.begin(), values_.end()); }

namespace {

PotentialField grid_potential(const DensitySpec& spec, const PeriodicGrid& grid) {
  auto u = make_potential(spec.potential, spec.potential_params);
  if (static_cast<int>(u.dimension()) != grid.dims)
    throw ParameterError("density potential dimension does not match the grid");
  return u;
}

std::vector<double> exp_of(std::vector<double> g) {
  // Shift before exponentiating; normalization removes the constant.
  const double mx = *std::max_element(g.begin(), g.end());
  for (double& v : g) v = std::exp(v - mx);
  return g;
}

}  // namespace

GridDensity make_density(const DensitySpec& spec, const PeriodicGrid& grid) {
  const std::string& name = spec.name;
  if (name == "uniform") return GridDensity(grid, std::vector<double>(grid.size(), 1.0));
  if (name == "gibbs" || name == "function-of-u" || name == "shifted-gibbs") {
    const auto u = grid_potential(spec, grid);
    double scale = 0.0;
    if (name == "function-of-u") {
      scale = spec.kappa;
    } else {
      if (!(spec.diffusion > 0.0)) throw ParameterError("gibbs density needs D > 0");
      scale = 1.0 / spec.diffusion;
    }
    const double s = name == "shifted-gibbs" ? spec.shift : 0.0;
    auto energy = grid.sample([&](std::span<const double> x) {
      std::vector<double> y(x.begin(), x.end());
      y[0] -= s;
      return -scale * u.energy(y);
    });
    return GridDensity(grid, exp_of(std::move(energy)));
  }
  if (name == "cosine") {
    if (grid.dims != 1) throw ParameterError("cosine density is one-dimensional");
    if (!(std::fabs(spec.amplitude) < 1.0)) throw ParameterError("cosine density needs |a| < 1");
    const double k = 2.0 * M_PI / grid.period;
    return GridDensity(grid, grid.sample([&](std::span<const double> x) {
                         return 1.0 + spec.amplitude * std::cos(k * x[0]);
                       }));
  }
  if (name == "random-smooth") {
    std::mt19937_64 gen(spec.seed);
    std::uniform_real_distribution<double> coef(-1.0, 1.0);
    struct Mode {
      int kx, ky;
      double a, b;
    };
    std::vector<Mode> modes;
    const int ky_max = grid.dims == 2 ? 4 : 0;
    const double count = grid.dims == 2 ? 40.0 : 4.0;
    const double scale = spec.coefficient_scale / std::sqrt(count);
    for (int kx = 0; kx <= 4; ++kx)
      for (int ky = -ky_max; ky <= ky_max; ++ky) {
        if (kx == 0 && ky <= 0) continue;
        const double a = scale * coef(gen);
        const double b = scale * coef(gen);
        modes.push_back({kx, ky, a, b});
      }
    const double k = 2.0 * M_PI / grid.period;
    auto g = grid.sample([&](std::span<const double> x) {
      double s = 0.0;
      for (const auto& m : modes) {
        const double ph = k * (m.kx * x[0] + (grid.dims == 2 ? m.ky * x[1] : 0.0));
        s += m.a * std::cos(ph) + m.b * std::sin(ph);
      }
      return s;
    });
    return GridDensity(grid, exp_of(std::move(g)));
  }
  if (name == "file") {
    auto v = read_node_values(spec.path);
    if (v.size() != grid.size())
      throw ParameterError("density file has " + std::to_string(v.size()) + " values, grid needs " +
                           std::to_string(grid.size()));
    return GridDensity(grid, std::move(v));
  }
  throw ParameterError("unknown density '" + name + "'");
}

std::vector<double> read_node_values(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParameterError("cannot open density file '" + path + "'");
  std::vector<double> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto start = line.find_first_not_of(" \t\r");
    if (start == std::string::npos || line[start] == '#') continue;
    std::istringstream ss(line);
    double v = 0.0;
    if (!(ss >> v)) throw ParameterError(path + ":" + std::to_string(lineno) + ": not a number");
    out.push_back(v);
  }
  return out;
}

PeriodicGrid grid_for_count(std::size_t count, int dims, double period) {
  if (dims == 1) return PeriodicGrid(1, count, period);
  const auto n = static_cast<std::size_t>(std::llround(std::sqrt(static_cast<double>(count))));
  if (n * n != count) throw ParameterError("2D density needs a square number of values");
  return PeriodicGrid(2, n, period);
}

}  // namespace irrl
