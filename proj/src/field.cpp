#include "irrl/field.hpp"

#include <cmath>
#include <numbers>

#include "irrl/errors.hpp"

namespace irrl {

PotentialField::PotentialField(std::string name, std::size_t dimension,
                               std::vector<double> periods, EnergyFn energy,
                               GradientFn gradient, LaplacianFn laplacian)
    : name_(std::move(name)),
      dimension_(dimension),
      periods_(std::move(periods)),
      energy_(std::move(energy)),
      gradient_(std::move(gradient)),
      laplacian_(std::move(laplacian)) {
  if (dimension_ == 0) throw ParameterError("potential dimension must be >= 1");
  if (!periods_.empty() && periods_.size() != dimension_)
    throw ParameterError("torus period vector must have one entry per axis");
  for (double l : periods_)
    if (!(l > 0.0)) throw ParameterError("torus periods must be positive");
}

void PotentialField::check_dimension(std::size_t n) const {
  if (n != dimension_)
    throw ParameterError("point has dimension " + std::to_string(n) + ", potential '" +
                         name_ + "' expects " + std::to_string(dimension_));
}

double PotentialField::energy(std::span<const double> x) const {
  check_dimension(x.size());
  return energy_(x);
}

void PotentialField::gradient(std::span<const double> x, std::span<double> out) const {
  check_dimension(x.size());
  check_dimension(out.size());
  gradient_(x, out);
}

std::vector<double> PotentialField::gradient(std::span<const double> x) const {
  std::vector<double> g(dimension_);
  gradient(x, g);
  return g;
}

double PotentialField::laplacian(std::span<const double> x) const {
  check_dimension(x.size());
  if (laplacian_) return laplacian_(x);
  constexpr double h = 1e-4;
  std::vector<double> y(x.begin(), x.end());
  const double u0 = energy_(x);
  double sum = 0.0;
  for (std::size_t i = 0; i < dimension_; ++i) {
    y[i] = x[i] + h;
    const double up = energy_(y);
    y[i] = x[i] - h;
    const double um = energy_(y);
    y[i] = x[i];
    sum += (up - 2.0 * u0 + um) / (h * h);
  }
  return sum;
}

void PotentialField::wrap(std::span<double> x) const noexcept {
  for (std::size_t i = 0; i < periods_.size() && i < x.size(); ++i) {
    const double l = periods_[i];
    x[i] -= l * std::floor(x[i] / l);
    if (x[i] >= l) x[i] -= l;
  }
}

namespace {

double param(const PotentialParams& p, std::string_view key, double fallback) {
  const auto it = p.find(key);
  return it == p.end() ? fallback : it->second;
}

std::size_t dimension_param(const PotentialParams& p, double fallback) {
  const double d = param(p, "dimension", fallback);
  if (!(d >= 1.0) || d != std::floor(d)) throw ParameterError("dimension must be a positive integer");
  return static_cast<std::size_t>(d);
}

PotentialField quadratic(const PotentialParams& p) {
  const std::size_t d = dimension_param(p, 2);
  return PotentialField(
      "quadratic", d, {},
      [](std::span<const double> x) {
        double s = 0.0;
        for (double v : x) s += v * v;
        return 0.5 * s;
      },
      [](std::span<const double> x, std::span<double> g) {
        for (std::size_t i = 0; i < x.size(); ++i) g[i] = x[i];
      },
      [d](std::span<const double>) { return static_cast<double>(d); });
}

PotentialField bimodal1() {
  return PotentialField(
      "bimodal1", 2, {},
      [](std::span<const double> z) {
        const double a = z[0] * z[0] - 1.0;
        return 0.25 * a * a + 0.5 * z[1] * z[1];
      },
      [](std::span<const double> z, std::span<double> g) {
        g[0] = z[0] * (z[0] * z[0] - 1.0);
        g[1] = z[1];
      },
      [](std::span<const double> z) { return 3.0 * z[0] * z[0]; });
}

PotentialField bimodal2() {
  return PotentialField(
      "bimodal2", 2, {},
      [](std::span<const double> z) {
        const double a = z[0] * z[0] - 1.0;
        const double w = 3.0 * z[1] + a;
        return a * a + 0.5 * w * w;
      },
      [](std::span<const double> z, std::span<double> g) {
        const double x = z[0];
        const double a = x * x - 1.0;
        const double w = 3.0 * z[1] + a;
        g[0] = 4.0 * x * a + 2.0 * x * w;
        g[1] = 3.0 * w;
      },
      [](std::span<const double> z) {
        const double x = z[0];
        const double w = 3.0 * z[1] + x * x - 1.0;
        // d/dx(4x^3 - 4x + 2xw) = 12x^2 - 4 + 2w + 4x^2 ; d/dy(3w) = 9
        return 16.0 * x * x - 4.0 + 2.0 * w + 9.0;
      });
}

PotentialField threewell() {
  return PotentialField(
      "threewell", 2, {},
      [](std::span<const double> z) {
        const double x = z[0], y = z[1];
        const double a = x * x - 1.0;
        const double b = y * y - 2.0;
        return 0.25 * (a * a * (b * b + 1.0) + 2.0 * y * y) - y / 8.0 +
               std::exp(-8.0 * x * x - 4.0 * y * y);
      },
      [](std::span<const double> z, std::span<double> g) {
        const double x = z[0], y = z[1];
        const double a = x * x - 1.0;
        const double b = y * y - 2.0;
        const double e = std::exp(-8.0 * x * x - 4.0 * y * y);
        g[0] = x * a * (b * b + 1.0) - 16.0 * x * e;
        g[1] = a * a * y * b + y - 0.125 - 8.0 * y * e;
      });
}

PotentialField torus_cosine(const PotentialParams& p) {
  const double a = param(p, "a", 1.0);
  const double b = param(p, "b", 0.5);
  const double period = param(p, "period", 2.0 * std::numbers::pi);
  const double k = 2.0 * std::numbers::pi / period;
  return PotentialField(
      "torus-cosine", 2, {period, period},
      [=](std::span<const double> z) { return a * std::cos(k * z[0]) + b * std::cos(k * z[1]); },
      [=](std::span<const double> z, std::span<double> g) {
        g[0] = -a * k * std::sin(k * z[0]);
        g[1] = -b * k * std::sin(k * z[1]);
      },
      [=](std::span<const double> z) {
        return -k * k * (a * std::cos(k * z[0]) + b * std::cos(k * z[1]));
      });
}

PotentialField flat(const PotentialParams& p) {
  const std::size_t d = dimension_param(p, 1);
  const double period = param(p, "period", 2.0 * std::numbers::pi);
  return PotentialField(
      "flat", d, std::vector<double>(d, period), [](std::span<const double>) { return 0.0; },
      [](std::span<const double>, std::span<double> g) {
        for (double& v : g) v = 0.0;
      },
      [](std::span<const double>) { return 0.0; });
}

}  // namespace

PotentialField make_potential(std::string_view name, const PotentialParams& params) {
  if (name == "quadratic") return quadratic(params);
  if (name == "bimodal1") return bimodal1();
  if (name == "bimodal2") return bimodal2();
  if (name == "threewell") return threewell();
  if (name == "torus-cosine") return torus_cosine(params);
  if (name == "flat") return flat(params);
  throw ParameterError("unknown potential '" + std::string(name) + "'");
}

std::vector<std::string> potential_catalog() {
  return {"quadratic", "bimodal1", "bimodal2", "threewell", "torus-cosine", "flat"};
}

}  // namespace irrl
