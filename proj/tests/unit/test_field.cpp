#include <cmath>
#include <random>
#include <vector>

#include "doctest.h"
#include "irrl/errors.hpp"
#include "irrl/field.hpp"

using namespace irrl;

namespace {

double norm(const std::vector<double>& v) {
  double s = 0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

}  // namespace

TEST_CASE("catalog energies") {
  CHECK(make_potential("bimodal1").energy(std::vector{0.0, 0.0}) == doctest::Approx(0.25));
  CHECK(make_potential("quadratic").energy(std::vector{0.0, 0.0}) == 0.0);
  CHECK(make_potential("bimodal2").energy(std::vector{1.0, 0.0}) == 0.0);
  const auto tc = make_potential("torus-cosine");
  CHECK(tc.energy(std::vector{0.0, 0.0}) == doctest::Approx(1.5));
}

TEST_CASE("catalog gradients at critical points") {
  CHECK(norm(make_potential("bimodal1").gradient(std::vector{1.0, 0.0})) == 0.0);
  const auto g = make_potential("quadratic").gradient(std::vector{2.0, 3.0});
  CHECK(g == std::vector{2.0, 3.0});
  const auto tw = make_potential("threewell");
  CHECK(norm(tw.gradient(std::vector{1.00051, 0.125314})) <= 1e-2);
  CHECK(norm(tw.gradient(std::vector{-1.00051, 0.125314})) <= 1e-2);
  CHECK(norm(tw.gradient(std::vector{0.0, -0.0139})) <= 1e-2);
  // The local maximum is an interior critical point with a larger energy than the minima.
  CHECK(tw.energy(std::vector{0.0, -0.0139}) > tw.energy(std::vector{1.00051, 0.125314}));
}

TEST_CASE("dimension mismatch is a parameter error") {
  const auto u = make_potential("bimodal1");
  CHECK_THROWS_AS(u.energy(std::vector{1.0}), ParameterError);
  CHECK_THROWS_AS(u.gradient(std::vector{1.0, 2.0, 3.0}), ParameterError);
  CHECK_THROWS_AS(make_potential("no-such-potential"), ParameterError);
}

TEST_CASE("analytic gradients match central differences") {
  std::mt19937_64 gen(11);
  std::uniform_real_distribution<double> d(-2.0, 2.0);
  for (const auto& name : potential_catalog()) {
    const auto u = make_potential(name);
    const std::size_t dim = u.dimension();
    for (int k = 0; k < 100; ++k) {
      std::vector<double> x(dim);
      for (auto& v : x) v = d(gen);
      const auto g = u.gradient(x);
      const double h = 1e-5;
      for (std::size_t i = 0; i < dim; ++i) {
        auto xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const double fd = (u.energy(xp) - u.energy(xm)) / (2 * h);
        const double scale = std::max(1.0, std::fabs(g[i]));
        CHECK_MESSAGE(std::fabs(fd - g[i]) <= 1e-5 * scale, name, " coordinate ", i);
      }
    }
  }
}

TEST_CASE("analytic laplacians match finite differences") {
  std::mt19937_64 gen(5);
  std::uniform_real_distribution<double> d(-1.5, 1.5);
  for (const auto& name : potential_catalog()) {
    const auto u = make_potential(name);
    if (!u.has_analytic_laplacian()) continue;
    for (int k = 0; k < 20; ++k) {
      std::vector<double> x(u.dimension());
      for (auto& v : x) v = d(gen);
      double fd = 0;
      const double h = 1e-4;
      for (std::size_t i = 0; i < x.size(); ++i) {
        auto xp = x, xm = x;
        xp[i] += h;
        xm[i] -= h;
        const auto gp = u.gradient(xp), gm = u.gradient(xm);
        fd += (gp[i] - gm[i]) / (2 * h);
      }
      CHECK_MESSAGE(u.laplacian(x) == doctest::Approx(fd).epsilon(1e-6).scale(1.0), name);
    }
  }
}

TEST_CASE("torus potentials are periodic with zero mean laplacian") {
  const auto u = make_potential("torus-cosine");
  REQUIRE(u.is_torus());
  const double L = u.periods()[0];
  CHECK(L == doctest::Approx(2 * M_PI));
  std::mt19937_64 gen(3);
  std::uniform_real_distribution<double> d(0.0, L);
  for (int k = 0; k < 50; ++k) {
    std::vector<double> x{d(gen), d(gen)};
    for (std::size_t i = 0; i < 2; ++i) {
      auto y = x;
      y[i] += u.periods()[i];
      CHECK(std::fabs(u.energy(x) - u.energy(y)) <= 1e-12);
      const auto gx = u.gradient(x), gy = u.gradient(y);
      CHECK(std::fabs(gx[0] - gy[0]) <= 1e-12);
      CHECK(std::fabs(gx[1] - gy[1]) <= 1e-12);
    }
  }
  const int n = 32;
  double avg = 0;
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) avg += u.laplacian(std::vector{i * L / n, j * L / n});
  CHECK(std::fabs(avg / (n * n)) <= 1e-10);
}

TEST_CASE("wrap reduces into the fundamental cell") {
  const auto u = make_potential("torus-cosine");
  std::vector<double> x{-0.5, 13.0};
  u.wrap(x);
  CHECK(x[0] == doctest::Approx(2 * M_PI - 0.5));
  CHECK(x[1] == doctest::Approx(13.0 - 4 * M_PI));
  const auto q = make_potential("quadratic");
  std::vector<double> z{-5.0, 7.0};
  q.wrap(z);
  CHECK(z == std::vector{-5.0, 7.0});
}
