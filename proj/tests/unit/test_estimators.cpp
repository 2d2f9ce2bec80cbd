#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include <boost/math/distributions/students_t.hpp>

#include "doctest.h"
#include "irrl/errors.hpp"
#include "irrl/estimators.hpp"
#include "irrl/rng.hpp"

using namespace irrl;

namespace {

TimeSeries series(std::vector<double> v, double dt = 1.0) { return {std::move(v), dt}; }

SdeConfig circle(double delta, double horizon, std::uint64_t seed) {
  SdeConfig c;
  c.potential = "flat";
  c.drift.kind = "constant";
  c.drift.delta = delta;
  c.diffusion = 1.0;
  c.dt = 1e-3;
  c.horizon = horizon;
  c.seed = seed;
  return c;
}

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

}  // namespace

TEST_CASE("ergodic average examples") {
  SdeConfig c;
  c.potential = "quadratic";
  c.horizon = 1.0;
  c.dt = 0.25;
  Trajectory constant(c, 2, std::vector<double>(10, 1.0));
  const auto f = make_observable("sumsq");
  CHECK(ergodic_average(constant, f, 0.0) == 2.0);
  CHECK(ergodic_average(constant, f, 0.5) == 2.0);
  CHECK(ergodic_average(series({1.0, 3.0}), 0.0) == 2.0);
  CHECK(ergodic_average(series({1.0, 3.0, 5.0, 7.0}), 2.0) == 6.0);
  CHECK_THROWS_AS(ergodic_average(constant, f, 1.0), ParameterError);
  CHECK_THROWS_AS(ergodic_average(series({1.0, 3.0}), 2.0), ParameterError);
}

TEST_CASE("OU ergodic average") {
  SdeConfig c;
  c.potential = "quadratic";
  c.diffusion = 0.1;
  c.horizon = 2000.0;
  c.seed = 99;
  const auto s = simulate_observable(c, make_observable("sumsq"));
  const auto r = batch_means(s, 20, 0.05, 5.0);
  CHECK(std::fabs(ergodic_average(s, 5.0) - 0.2) <= 3.0 * std::sqrt(r.estimator_variance()));
  CHECK(ergodic_average(s, 5.0) == doctest::Approx(r.estimate).epsilon(1e-12));
}

TEST_CASE("batch means hand example") {
  const auto r = batch_means(series({1, 1, 2, 2, 3, 3, 4, 4, 9}), 4, 0.05, 0.0);
  CHECK(r.batch_means == std::vector<double>{1, 2, 3, 4});
  CHECK(r.estimate == doctest::Approx(2.5));
  CHECK(r.s2m == doctest::Approx(5.0 / 3.0));
  const double half = t_quantile(0.025, 3) * std::sqrt(5.0 / 3.0 / 4.0);
  CHECK(r.ci_lower == doctest::Approx(2.5 - half));
  CHECK(r.ci_upper == doctest::Approx(2.5 + half));
  CHECK(r.block_length == 2);
  CHECK(r.asymptotic_variance() == doctest::Approx(2.0 * 5.0 / 3.0));
  const auto b = batch_means_from_blocks(std::vector<double>{1, 2, 3, 4}, 0.05);
  CHECK(b.s2m == doctest::Approx(5.0 / 3.0));
}

TEST_CASE("batch means constant series and errors") {
  const auto r = batch_means(series(std::vector<double>(100, 3.5), 0.1), 10, 0.05, 1.0);
  CHECK(r.s2m == 0.0);
  CHECK(r.ci_lower == r.ci_upper);
  CHECK(r.estimate == 3.5);
  CHECK_THROWS_AS(batch_means(series({1, 2, 3}), 1, 0.05, 0.0), ParameterError);
  CHECK_THROWS_AS(batch_means(series({1, 2, 3}), 4, 0.05, 0.0), ParameterError);
  CHECK_THROWS_AS(batch_means(series({1, 2, 3, 4}), 2, 1.5, 0.0), ParameterError);
}

TEST_CASE("batch means affine equivariance") {
  std::mt19937_64 g(4);
  std::normal_distribution<double> n;
  std::vector<double> v(1000);
  for (auto& x : v) x = n(g);
  const double a = -3.0, b = 2.5;
  std::vector<double> w(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) w[i] = a + b * v[i];
  const auto r = batch_means(series(v, 0.01), 10, 0.1, 0.5);
  const auto s = batch_means(series(w, 0.01), 10, 0.1, 0.5);
  CHECK(s.estimate == doctest::Approx(a + b * r.estimate));
  CHECK(s.s2m == doctest::Approx(b * b * r.s2m));
  CHECK(s.ci_lower == doctest::Approx(a + b * r.ci_lower));
  CHECK(s.ci_upper == doctest::Approx(a + b * r.ci_upper));
}

TEST_CASE("t quantile examples") {
  CHECK(std::fabs(t_quantile(0.025, 9) - 2.262157) <= 1e-5);
  CHECK(std::fabs(t_quantile(0.25, 1) - 1.0) <= 1e-9);
  CHECK(t_quantile(0.5, 7) == 0.0);
  CHECK(t_quantile(0.975, 9) == doctest::Approx(-t_quantile(0.025, 9)));
  CHECK_THROWS_AS(t_quantile(0.0, 3), ParameterError);
  CHECK_THROWS_AS(t_quantile(1.0, 3), ParameterError);
  CHECK_THROWS_AS(t_quantile(0.1, 0), ParameterError);
}

TEST_CASE("t quantile agrees with an independent implementation") {
  for (int dof : {1, 2, 3, 5, 9, 13, 19, 50, 300}) {
    boost::math::students_t dist(dof);
    for (double a : {0.4, 0.25, 0.1, 0.05, 0.025, 0.005, 1e-4}) {
      const double ref = boost::math::quantile(boost::math::complement(dist, a));
      CHECK_MESSAGE(std::fabs(t_quantile(a, dof) - ref) <= 1e-6 * std::max(1.0, ref), dof, " ", a);
      CHECK(student_t_cdf(ref, dof) == doctest::Approx(1.0 - a).epsilon(1e-10));
    }
  }
  CHECK(regularized_incomplete_beta(2.0, 3.0, 0.4) == doctest::Approx(0.5248));
  CHECK(regularized_incomplete_beta(1.0, 1.0, 0.3) == doctest::Approx(0.3));
}

TEST_CASE("batch count schedule") {
  CHECK(batch_count_schedule(1.0) == 10);
  CHECK(batch_count_schedule(295.0) == 14);
  CHECK(batch_count_schedule(700.0) == 20);
  CHECK(batch_count_schedule(5000.0) == 20);
}

TEST_CASE("confidence interval coverage on the OU process") {
  int covered = 0;
  const int reps = 200;
  for (int r = 0; r < reps; ++r) {
    SdeConfig c;
    c.potential = "quadratic";
    c.diffusion = 0.1;
    c.dt = 1e-2;
    c.horizon = 200.0;
    c.seed = 1000 + static_cast<std::uint64_t>(r);
    const auto rep = batch_means(simulate_observable(c, make_observable("sumsq")), 10, 0.05, 5.0);
    // Euler bias of the stationary second moment at dt = 0.01 is 2D/(1 - dt/2) - 2D ~ 0.001.
    covered += rep.ci_lower <= 0.2 && 0.2 <= rep.ci_upper;
  }
  CHECK(covered >= 176);
}

TEST_CASE("white noise: both variance estimators agree") {
  const NormalStream s(5, 0);
  std::vector<double> v(200000);
  for (std::size_t i = 0; i < v.size(); ++i) v[i] = s.at(i, 0);
  const auto ts = series(v, 0.01);
  const double b = asymptotic_variance_estimate(ts, 200, 0.0, VarianceMethod::batch_scaled);
  const double a = asymptotic_variance_estimate(ts, 20, 0.0, VarianceMethod::autocov);
  CHECK(std::fabs(a - 0.01) < 0.25 * 0.01);
  CHECK(std::fabs(b / a - 1.0) < 0.25);
  CHECK_THROWS_AS(asymptotic_variance_estimate(series({1, 2, 3}), 2, 0.0, VarianceMethod::autocov),
                  ParameterError);
}

TEST_CASE("autocov estimator on an AR(1) series") {
  // x_{k+1} = r x_k + e_k: integrated autocovariance (1+r)/(1-r) * var, var = 1/(1-r^2).
  const double r = 0.9;
  const NormalStream s(8, 0);
  std::vector<double> v(400000);
  double x = 0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    x = r * x + s.at(i, 0);
    v[i] = x;
  }
  const double expected = (1 + r) / (1 - r) / (1 - r * r);
  const double a = asymptotic_variance_estimate(series(v, 1.0), 20, 0.0, VarianceMethod::autocov);
  CHECK(a == doctest::Approx(expected).epsilon(0.1));
}

TEST_CASE("circle asymptotic variance") {
  const auto f = make_observable("cos");
  const double d0 = asymptotic_variance_estimate(simulate_observable(circle(0.0, 2000.0, 17), f), 20,
                                                 5.0, VarianceMethod::autocov);
  CHECK(d0 == doctest::Approx(1.0).epsilon(0.15));
  const double d2 = asymptotic_variance_estimate(simulate_observable(circle(2.0, 2000.0, 17), f), 20,
                                                 5.0, VarianceMethod::batch_scaled);
  CHECK(d2 == doctest::Approx(0.2).epsilon(0.15));
}

TEST_CASE("variance decreases with drift strength on the circle") {
  const auto f = make_observable("cos");
  std::vector<double> med;
  for (double delta : {0.0, 1.0, 2.0, 4.0}) {
    std::vector<double> est;
    for (std::uint64_t seed = 1; seed <= 5; ++seed)
      est.push_back(asymptotic_variance_estimate(simulate_observable(circle(delta, 400.0, seed), f),
                                                 20, 5.0, VarianceMethod::batch_scaled));
    med.push_back(median(est));
  }
  for (std::size_t i = 1; i < med.size(); ++i) CHECK(med[i] < med[i - 1]);
}
