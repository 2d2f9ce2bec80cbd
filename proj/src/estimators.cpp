#include "irrl/estimators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "irrl/errors.hpp"
#include "irrl/kernels.hpp"

namespace irrl {

namespace {

std::span<const double> post_burn_in(const TimeSeries& s, double v) {
  if (!(v >= 0.0)) throw ParameterError("burn-in must be non-negative");
  if (v >= s.duration()) throw ParameterError("burn-in must be shorter than the series");
  const std::size_t j = s.index_at(v);
  if (j >= s.values.size()) throw ParameterError("no samples after burn-in");
  return std::span<const double>(s.values).subspan(j);
}

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw ParameterError("alpha must lie in (0, 1)");
}

// Continued fraction for I_x(a, b), modified Lentz.
double beta_cf(double a, double b, double x) {
  constexpr double tiny = 1e-300;
  constexpr double eps = 1e-16;
  double c = 1.0;
  double d = 1.0 - (a + b) * x / (a + 1.0);
  if (std::fabs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m < 10000; ++m) {
    const double m2 = 2.0 * m;
    double aa = m * (b - m) * x / ((a + m2 - 1.0) * (a + m2));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (a + b + m) * x / ((a + m2) * (a + m2 + 1.0));
    d = 1.0 + aa * d;
    if (std::fabs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::fabs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::fabs(del - 1.0) < eps) return h;
  }
  throw NumericError("incomplete beta continued fraction did not converge", 0);
}

// P(T > t) for t >= 0.
double t_upper_tail(double t, double dof) {
  return 0.5 * regularized_incomplete_beta(0.5 * dof, 0.5, dof / (dof + t * t));
}

double t_pdf(double t, double dof) {
  const double lg = std::lgamma(0.5 * (dof + 1.0)) - std::lgamma(0.5 * dof);
  return std::exp(lg - 0.5 * std::log(dof * M_PI) -
                  0.5 * (dof + 1.0) * std::log1p(t * t / dof));
}

}  // namespace

double ergodic_average(const TimeSeries& series, double v) {
  const auto w = post_burn_in(series, v);
  return std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
}

double ergodic_average(const Trajectory& traj, const Observable& f, double v) {
  if (v >= traj.config().horizon) throw ParameterError("burn-in must be shorter than the horizon");
  return ergodic_average(traj.observe(f), v);
}

BatchMeansReport batch_means_from_blocks(std::span<const double> blocks, double alpha) {
  check_alpha(alpha);
  const auto m = static_cast<int>(blocks.size());
  if (m < 2) throw ParameterError("batch means needs m >= 2");
  BatchMeansReport r;
  r.m = m;
  r.alpha = alpha;
  r.batch_means.assign(blocks.begin(), blocks.end());
  r.estimate = std::accumulate(blocks.begin(), blocks.end(), 0.0) / m;
  double ss = 0.0;
  for (double b : blocks) ss += (b - r.estimate) * (b - r.estimate);
  r.s2m = ss / (m - 1);
  const double half = t_quantile(0.5 * alpha, m - 1) * std::sqrt(r.s2m / m);
  r.ci_lower = r.estimate - half;
  r.ci_upper = r.estimate + half;
  r.block_length = 1;
  r.dt = 1.0;
  return r;
}

BatchMeansReport batch_means(const TimeSeries& series, int m, double alpha, double v) {
  if (m < 2) throw ParameterError("batch means needs m >= 2");
  check_alpha(alpha);
  const auto w = post_burn_in(series, v);
  const std::size_t len = w.size() / static_cast<std::size_t>(m);
  if (len == 0) throw ParameterError("batch length is zero: too few samples for m batches");
  std::vector<double> blocks(static_cast<std::size_t>(m));
  kernels::omp::block_means(w.first(len * static_cast<std::size_t>(m)), blocks);
  auto r = batch_means_from_blocks(blocks, alpha);
  r.t = series.duration();
  r.v = v;
  r.block_length = len;
  r.dt = series.dt;
  return r;
}

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw ParameterError("incomplete beta needs a, b > 0");
  if (!(x >= 0.0 && x <= 1.0)) throw ParameterError("incomplete beta needs x in [0, 1]");
  if (x == 0.0 || x == 1.0) return x;
  const double lbt = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) +
                     b * std::log1p(-x);
  if (x < (a + 1.0) / (a + b + 2.0)) return std::exp(lbt) * beta_cf(a, b, x) / a;
  return 1.0 - std::exp(lbt) * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_cdf(double t, double dof) {
  if (!(dof > 0.0)) throw ParameterError("degrees of freedom must be positive");
  if (std::isnan(t)) throw ParameterError("t is NaN");
  if (std::isinf(t)) return t > 0 ? 1.0 : 0.0;
  const double tail = t_upper_tail(std::fabs(t), dof);
  return t >= 0 ? 1.0 - tail : tail;
}

double t_quantile(double alpha_half, int dof) {
  if (!(alpha_half > 0.0 && alpha_half < 1.0)) throw ParameterError("alpha_half must lie in (0, 1)");
  if (dof < 1) throw ParameterError("degrees of freedom must be >= 1");
  if (alpha_half == 0.5) return 0.0;
  if (alpha_half > 0.5) return -t_quantile(1.0 - alpha_half, dof);
  const double nu = dof;
  double lo = 0.0, hi = 1.0;
  while (t_upper_tail(hi, nu) > alpha_half) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw NumericError("t quantile bracket overflow", 0);
  }
  for (int it = 0; it < 200 && hi - lo > 1e-13 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    (t_upper_tail(mid, nu) > alpha_half ? lo : hi) = mid;
  }
  double q = 0.5 * (lo + hi);
  // Two Newton polishes on the tail equation.
  for (int it = 0; it < 2; ++it) {
    const double step = (t_upper_tail(q, nu) - alpha_half) / t_pdf(q, nu);
    const double next = q + step;
    if (next > lo && next < hi) q = next;
  }
  return q;
}

std::string to_string(VarianceMethod method) {
  return method == VarianceMethod::batch_scaled ? "batch_scaled" : "autocov";
}

VarianceMethod variance_method_from_string(const std::string& name) {
  if (name == "batch_scaled") return VarianceMethod::batch_scaled;
  if (name == "autocov") return VarianceMethod::autocov;
  throw ParameterError("unknown variance method '" + name + "'");
}

double asymptotic_variance_estimate(const TimeSeries& series, int m, double v,
                                    VarianceMethod method) {
  if (m < 2) throw ParameterError("variance estimate needs m >= 2");
  const auto w = post_burn_in(series, v);
  if (w.size() < 2 * static_cast<std::size_t>(m))
    throw ParameterError("series shorter than 2m samples");
  if (method == VarianceMethod::batch_scaled) {
    return batch_means(series, m, 0.05, v).asymptotic_variance();
  }
  const double mean = std::accumulate(w.begin(), w.end(), 0.0) / static_cast<double>(w.size());
  // Lags are scanned in windows, growing until the first non-positive value appears.
  std::size_t window = std::min<std::size_t>(w.size() - 1, 4096);
  for (;;) {
    const auto c = kernels::autocovariance_fft(w, mean, window);
    if (c[0] <= 0.0) return 0.0;
    double sum = c[0];
    for (std::size_t k = 1; k < c.size(); ++k) {
      if (c[k] <= 0.0) return series.dt * sum;
      sum += 2.0 * c[k];
    }
    if (window >= w.size() - 1) return series.dt * sum;
    window = std::min(w.size() - 1, window * 4);
  }
}

int batch_count_schedule(double t) {
  if (!(t > 0.0)) throw ParameterError("duration must be positive");
  const double m = std::round(10.0 * (1.0 + t / 700.0));
  return static_cast<int>(std::clamp(m, 10.0, 20.0));
}

}  // namespace irrl
