#pragma once

#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace irrl {

/// Scalar test function f evaluated along trajectories.
struct Observable {
  std::string name;
  std::function<double(std::span<const double>)> eval;
};

/// `sumsq` f = |z|^2, `cos` f = cos(z_0), `x` f = z_0.
Observable make_observable(std::string_view name);

/// Samples f(Z_{j dt}), j = 0..n-1, read as the left-Riemann integrand on [0, n dt).
struct TimeSeries {
  std::vector<double> values;
  double dt = 1.0;

  double duration() const noexcept { return dt * static_cast<double>(values.size()); }
  /// Index of the first sample at or after time v.
  std::size_t index_at(double v) const;
  /// Leading prefix covering [0, t).
  TimeSeries prefix(double t) const;
};

}  // namespace irrl
