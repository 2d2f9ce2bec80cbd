#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "irrl/observable.hpp"
#include "irrl/sampler.hpp"

namespace irrl {

struct BatchMeansReport {
  double estimate = 0.0;
  std::vector<double> batch_means;
  double s2m = 0.0;
  double ci_lower = 0.0;
  double ci_upper = 0.0;
  int m = 0;
  double alpha = 0.05;
  double t = 0.0;  ///< series duration
  double v = 0.0;  ///< burn-in
  std::size_t block_length = 0;  ///< samples per block
  double dt = 0.0;

  /// s2m / m, the variance of the estimate.
  double estimator_variance() const { return s2m / m; }
  /// (t_eff / m) s2m, which estimates the asymptotic variance.
  double asymptotic_variance() const { return static_cast<double>(block_length) * dt * s2m; }
};

/// Left-Riemann (1/(t-v)) int_v^t f ds over the stored samples.
double ergodic_average(const TimeSeries& series, double v);
double ergodic_average(const Trajectory& traj, const Observable& f, double v);

BatchMeansReport batch_means(const TimeSeries& series, int m, double alpha, double v);
/// Report built from given block means (block length 1, dt 1).
BatchMeansReport batch_means_from_blocks(std::span<const double> block_means, double alpha);

double regularized_incomplete_beta(double a, double b, double x);
double student_t_cdf(double t, double dof);
/// Upper quantile q with P(T_dof > q) = alpha_half.
double t_quantile(double alpha_half, int dof);

enum class VarianceMethod { batch_scaled, autocov };
std::string to_string(VarianceMethod method);
VarianceMethod variance_method_from_string(const std::string& name);

/// sigma^2_f = 2 int_0^inf c(s) ds estimated from the post-burn-in series.
/// autocov: dt [c(0) + 2 sum_{k=1}^{K-1} c(k dt)], K the first lag with c <= 0.
double asymptotic_variance_estimate(const TimeSeries& series, int m, double v,
                                    VarianceMethod method);

/// m = clamp(round(10 (1 + t/700)), 10, 20).
int batch_count_schedule(double t);

}  // namespace irrl
