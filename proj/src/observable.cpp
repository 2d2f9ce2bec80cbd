#include "irrl/observable.hpp"

#include <cmath>

#include "irrl/errors.hpp"

namespace irrl {

Observable make_observable(std::string_view name) {
  if (name == "sumsq")
    return {"sumsq", [](std::span<const double> z) {
              double s = 0.0;
              for (double v : z) s += v * v;
              return s;
            }};
  if (name == "cos") return {"cos", [](std::span<const double> z) { return std::cos(z[0]); }};
  if (name == "x") return {"x", [](std::span<const double> z) { return z[0]; }};
  throw ParameterError("unknown observable '" + std::string(name) + "'");
}

std::size_t TimeSeries::index_at(double v) const {
  if (!(dt > 0.0)) throw ParameterError("time series step must be positive");
  if (v <= 0.0) return 0;
  // Tolerate v being an integer multiple of dt up to rounding.
  const double k = v / dt;
  const double r = std::round(k);
  const double idx = std::abs(k - r) < 1e-9 * std::max(1.0, r) ? r : std::ceil(k);
  return static_cast<std::size_t>(idx);
}

TimeSeries TimeSeries::prefix(double t) const {
  const std::size_t n = std::min(values.size(), index_at(t));
  return {std::vector<double>(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(n)), dt};
}

}  // namespace irrl
