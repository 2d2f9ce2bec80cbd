#include <cmath>
#include <cstdio>
#include <fstream>
#include <vector>

#include "doctest.h"
#include "irrl/errors.hpp"
#include "irrl/ratefn.hpp"

using namespace irrl;

namespace {

// Closed forms on the circle for p = 1 + a cos x (normalized measure).
constexpr double kCircleI0 = 0.0167468245269452;  // (1 - sqrt(1 - a^2)) / 8, a = 1/2
constexpr double kCircleK = 0.0669872981077807;   // (1 - sqrt(1 - a^2)) / 2
// torus-cosine (a = 1, b = 1/2), p ~ exp(-2 U(x - 1, y)), C0 = J grad U, D = 1/2.
constexpr double kShiftedK = 0.0787685560780;

const PotentialField& torus() {
  static const PotentialField u = make_potential("torus-cosine");
  return u;
}

DriftField rotation(double delta) {
  return make_rotational_drift(AntisymmetricMatrix::standard(), torus(), delta);
}

GridDensity density(const std::string& name, std::size_t n, int dims = 2) {
  DensitySpec s;
  s.name = name;
  if (dims == 1) s.potential = "flat";
  return make_density(s, PeriodicGrid(dims, n));
}

GridDensity circle_density(std::size_t n) { return density("cosine", n, 1); }

}  // namespace

TEST_CASE("grid densities are normalized and positive") {
  const auto p = density("shifted-gibbs", 32);
  double mean = 0;
  for (double v : p.values()) mean += v;
  CHECK(std::fabs(mean / 32 / 32 - 1.0) <= 1e-12);
  CHECK(p.min() > 0);
  const PeriodicGrid g(1, 8);
  CHECK_THROWS_AS(GridDensity(g, std::vector<double>{1, 1, 1, 0, 1, 1, 1, 1}), ParameterError);
  CHECK_THROWS_AS(GridDensity(g, std::vector<double>{1, 1, 1, -1, 1, 1, 1, 1}), ParameterError);
  CHECK_THROWS_AS(GridDensity(g, std::vector<double>(7, 1.0)), ParameterError);
  CHECK_THROWS_AS(density("no-such-density", 16), ParameterError);
}

TEST_CASE("density files") {
  const std::string path = "irrl_test_density.txt";
  {
    std::ofstream out(path);
    out << "# four nodes\n2\n1\n\n2\n3\n";
  }
  DensitySpec s;
  s.name = "file";
  s.path = path;
  const auto p = make_density(s, grid_for_count(4, 1));
  CHECK(p.values() == std::vector<double>{1.0, 0.5, 1.0, 1.5});
  std::remove(path.c_str());
  CHECK(grid_for_count(16, 2).n == 4);
  CHECK_THROWS_AS(grid_for_count(15, 2), ParameterError);
}

TEST_CASE("gauge field at the invariant density is the potential itself") {
  // div[p (-grad U + grad psi)] = 0 with p ~ exp(-2U) is solved by psi = U - mean(U),
  // and the drift correction D grad log p + grad psi vanishes.
  const auto p = density("gibbs", 64);
  const FluxOperator op(p.grid(), Discretization::spectral);
  const auto psi = solve_gauge_field(op, p, op.drift(torus(), nullptr));
  CHECK(psi.residual_norm <= 1e-10);
  auto un = p.grid().sample([](std::span<const double> x) { return torus().energy(x); });
  double mean = 0;
  for (double v : un) mean += v;
  mean /= static_cast<double>(un.size());
  double err = 0, psi_mean = 0;
  for (std::size_t i = 0; i < un.size(); ++i) {
    err = std::max(err, std::fabs(psi.values[i] - (un[i] - mean)));
    psi_mean += psi.values[i];
  }
  CHECK(err <= 1e-10);
  CHECK(std::fabs(psi_mean / static_cast<double>(un.size())) <= 1e-12);
  std::vector<double> lp(p.size());
  for (std::size_t i = 0; i < lp.size(); ++i) lp[i] = std::log(p[i]);
  const auto glp = op.gradient(lp), gpsi = op.gradient(psi.values);
  double corr = 0;
  for (std::size_t a = 0; a < 2; ++a)
    for (std::size_t i = 0; i < p.size(); ++i) corr = std::max(corr, std::fabs(0.5 * glp[a][i] + gpsi[a][i]));
  CHECK(corr <= 1e-10);
}

TEST_CASE("gauge field in 1D has a constant flux") {
  for (auto scheme : {Discretization::spectral, Discretization::finite_volume}) {
    DensitySpec s;
    s.name = "random-smooth";
    s.potential = "flat";
    s.seed = 9;
    s.coefficient_scale = 0.5;
    const auto p = make_density(s, PeriodicGrid(1, 256));
    const FluxOperator op(p.grid(), scheme);
    const double delta = 1.7;
    const auto c = make_constant_drift({1.0}, delta);
    const auto b = op.drift(make_potential("flat"), &c);
    const auto psi = solve_gauge_field(op, p, b);
    const auto face = op.flux_density(p);
    const auto g = op.gradient(psi.values);
    std::vector<double> flux(p.size());
    double mean = 0;
    for (std::size_t i = 0; i < flux.size(); ++i) {
      flux[i] = face[0][i] * (b[0][i] + g[0][i]);
      mean += flux[i];
    }
    mean /= static_cast<double>(flux.size());
    double dev = 0;
    for (double f : flux) dev = std::max(dev, std::fabs(f - mean));
    CHECK_MESSAGE(dev <= 1e-8, to_string(scheme));
    if (scheme == Discretization::spectral) {
      double inv = 0;
      for (double v : p.values()) inv += 1.0 / v;
      CHECK(mean == doctest::Approx(delta / (inv / static_cast<double>(p.size()))).epsilon(1e-10));
    }
  }
}

TEST_CASE("gauge field of a zero drift is zero") {
  const auto p = density("shifted-gibbs", 32);
  const GridVectorField zero(2, std::vector<double>(p.size(), 0.0));
  const auto psi = solve_gauge_field(p, zero);
  for (double v : psi.values) CHECK(v == 0.0);
  CHECK_THROWS_AS(solve_gauge_field(p, GridVectorField(1, std::vector<double>(p.size()))),
                  ParameterError);
}

TEST_CASE("gauge solve reports non-convergence with its residual history") {
  const auto p = density("shifted-gibbs", 32);
  const FluxOperator op(p.grid(), Discretization::spectral);
  CgOptions o;
  o.max_iterations = 2;
  try {
    solve_gauge_field(op, p, op.drift(torus(), nullptr), o);
    FAIL("expected SolverError");
  } catch (const SolverError& e) {
    CHECK(e.residual_history().size() == 3);
    CHECK(e.residual_history().back() > 1e-10);
  }
}

TEST_CASE("reversible rate") {
  for (auto scheme : {Discretization::spectral, Discretization::finite_volume}) {
    CHECK(rate_reversible(density("gibbs", 64), torus(), 0.5, scheme) <= 1e-8);
    CHECK(rate_reversible(density("uniform", 16, 1), make_potential("flat"), 0.5, scheme) == 0.0);
  }
  CHECK(rate_reversible(circle_density(128), make_potential("flat"), 0.5) ==
        doctest::Approx(kCircleI0).epsilon(1e-10));
  // Other D: gibbs density for that D.
  DensitySpec s;
  s.name = "gibbs";
  s.diffusion = 0.2;
  CHECK(rate_reversible(make_density(s, PeriodicGrid(2, 48)), torus(), 0.2) <= 1e-8);
}

TEST_CASE("irreversible rate vanishes at the invariant density") {
  const auto p = density("gibbs", 64);
  for (double delta : {0.0, 1.0, 10.0}) {
    const auto r = rate_irreversible(p, torus(), rotation(delta), 0.5);
    CHECK(r.I_C <= 1e-8);
    CHECK(r.J_C <= 1e-8);
    CHECK(r.mismatch <= 1e-8);
  }
}

TEST_CASE("degenerate densities: p a function of U") {
  const auto p = density("function-of-u", 64);
  for (double delta : {0.5, 1.0, 4.0, 10.0}) {
    const auto r = rate_irreversible(p, torus(), rotation(delta), 0.5);
    CHECK(r.J_C <= 1e-8);
    CHECK(r.I_C >= r.I0);
  }
  CHECK(quadratic_coefficient(p, rotation(1.0), 0.5) <= 1e-8);
}

TEST_CASE("shifted density: golden value and quadratic law") {
  const auto p = density("shifted-gibbs", 64);
  const FluxOperator op(p.grid(), Discretization::spectral);
  const double k = quadratic_coefficient(op, p, rotation(3.0), 0.5);
  CHECK(k == doctest::Approx(kShiftedK).epsilon(1e-9));
  for (double delta : {0.5, 1.0, 2.0, 4.0}) {
    const auto r = rate_irreversible(op, p, torus(), rotation(delta), 0.5);
    CHECK(r.J_C > 1e-4);
    CHECK(std::fabs(r.J_C / (delta * delta) / k - 1.0) <= 1e-6);
    CHECK(std::fabs(r.I_C - r.three_term) <= 1e-8);
    CHECK(r.I_C >= r.I0);
  }
}

TEST_CASE("quadratic coefficient on the circle") {
  CHECK(quadratic_coefficient(circle_density(256), make_constant_drift({1.0}, 1.0), 0.5) ==
        doctest::Approx(kCircleK).epsilon(1e-10));
}

TEST_CASE("circle closed form and PDE route") {
  CHECK(std::fabs(circle_rate_closed_form(density("uniform", 64, 1), 3.0)) <= 1e-14);
  const auto p = circle_density(512);
  const double closed = circle_rate_closed_form(p, 1.0);
  CHECK(std::fabs(closed - (kCircleI0 + kCircleK)) <= 1e-10);
  const auto r = rate_irreversible(p, make_potential("flat"), make_constant_drift({1.0}, 1.0), 0.5);
  CHECK(std::fabs(r.I_C - closed) <= 1e-6);
  CHECK(r.I0 == doctest::Approx(kCircleI0).epsilon(1e-10));
  CHECK(r.J_C == doctest::Approx(kCircleK).epsilon(1e-10));
}

TEST_CASE("grid convergence of the finite-volume scheme on the circle") {
  const auto flat = make_potential("flat");
  const auto c = make_constant_drift({1.0}, 1.0);
  std::vector<double> vals;
  for (std::size_t n : {16, 32, 64, 128, 256})
    vals.push_back(rate_irreversible(circle_density(n), flat, c, 0.5, Discretization::finite_volume).I_C);
  for (std::size_t i = 0; i + 2 < vals.size(); ++i) {
    const double r = std::fabs(vals[i] - vals[i + 1]) / std::fabs(vals[i + 1] - vals[i + 2]);
    CHECK(r >= 3.0);
  }
  CHECK(std::fabs(vals.back() - (kCircleI0 + kCircleK)) <= 1e-4);
  // The spectral scheme converges faster than any power at coarse resolution.
  const double e8 = std::fabs(rate_irreversible(circle_density(8), flat, c, 0.5).I_C - (kCircleI0 + kCircleK));
  const double e16 = std::fabs(rate_irreversible(circle_density(16), flat, c, 0.5).I_C - (kCircleI0 + kCircleK));
  CHECK(e8 / e16 >= 3.0);
}

TEST_CASE("finite-volume and spectral schemes agree on the torus") {
  const auto p = density("shifted-gibbs", 128);
  const double fv = quadratic_coefficient(p, rotation(1.0), 0.5, Discretization::finite_volume);
  CHECK(fv == doctest::Approx(kShiftedK).epsilon(1e-4));
}

TEST_CASE("irreversible increment is non-negative and detects non-degenerate densities") {
  int positive = 0;
  const auto c = rotation(1.0);
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    DensitySpec s;
    s.name = "random-smooth";
    s.seed = seed;
    const auto p = make_density(s, PeriodicGrid(2, 48));
    const auto r = rate_irreversible(p, torus(), c, 0.5);
    CHECK(r.J_C >= 0.0);
    CHECK(r.I_C >= r.I0);
    CHECK(std::fabs(r.I_C - r.three_term) <= 1e-8 * std::max(1.0, r.I_C));
    if (r.max_div_pc > 1e-4) {
      CHECK(r.J_C > 1e-8);
      ++positive;
    }
  }
  CHECK(positive == 50);
}

TEST_CASE("other diffusion constants") {
  // J_C and K scale as 1/D for fixed p; the gauge equation does not involve D.
  const auto p = density("shifted-gibbs", 32);
  const double k5 = quadratic_coefficient(p, rotation(1.0), 0.5);
  const double k1 = quadratic_coefficient(p, rotation(1.0), 0.1);
  CHECK(k1 == doctest::Approx(5.0 * k5).epsilon(1e-12));
  CHECK_THROWS_AS(quadratic_coefficient(p, rotation(1.0), 0.0), ParameterError);
}
