#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "irrl/estimators.hpp"
#include "irrl/experiment.hpp"
#include "irrl/ratefn.hpp"
#include "irrl/sampler.hpp"
#include "irrl/spectral.hpp"

using namespace irrl;
namespace fs = std::filesystem;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void run(int id, const std::string& name, double budget_s, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const bool in_time = secs <= budget_s;
  const bool pass = o.pass && in_time;
  failures += !pass;
  std::printf("%s %2d %s: %s [%.2f s of %.0f s%s]\n", pass ? "PASS" : "FAIL", id, name.c_str(),
              o.detail.c_str(), secs, budget_s, in_time ? "" : ", over budget");
  std::fflush(stdout);
}

std::string fmt(const char* f, double a) {
  char buf[128];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

const PotentialField& torus() {
  static const PotentialField u = make_potential("torus-cosine");
  return u;
}

DriftField rotation(double delta) {
  return make_rotational_drift(AntisymmetricMatrix::standard(), torus(), delta);
}

GridDensity torus_density(const std::string& name, std::size_t n) {
  DensitySpec s;
  s.name = name;
  return make_density(s, PeriodicGrid(2, n));
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome circle_closed_form() {
  // p = 1 + a cos x: mean(p'^2/p) = 1 - sqrt(1 - a^2) and mean(1/p) = 1/sqrt(1 - a^2).
  const double a = 0.5;
  const double s = std::sqrt(1.0 - a * a);
  const double exact = (1.0 - s) / 8.0 + 0.5 * (1.0 - s);
  DensitySpec spec;
  spec.name = "cosine";
  spec.potential = "flat";
  const GridDensity p = make_density(spec, PeriodicGrid(1, 512));
  const double closed = circle_rate_closed_form(p, 1.0);
  const RateReport r =
      rate_irreversible(p, make_potential("flat"), make_constant_drift({1.0}, 1.0), 0.5);
  const bool ok = std::fabs(closed - 0.0837341) <= 1e-6 && std::fabs(closed - exact) <= 1e-6 &&
                  std::fabs(r.I_C - closed) <= 1e-6;
  return {ok, "closed form " + fmt("%.10f", closed) + ", analytic " + fmt("%.10f", exact) +
                  ", PDE N=512 " + fmt("%.10f", r.I_C)};
}

Outcome quadratic_law() {
  const GridDensity p = torus_density("shifted-gibbs", 128);
  const FluxOperator op(p.grid(), Discretization::spectral);
  const double k = quadratic_coefficient(op, p, rotation(1.0), 0.5);
  double worst_k = 0.0, lo = 1e300, hi = -1e300;
  for (double delta : {0.5, 1.0, 2.0, 4.0}) {
    const RateReport r = rate_irreversible(op, p, torus(), rotation(delta), 0.5);
    const double ratio = r.J_C / (delta * delta);
    lo = std::min(lo, ratio);
    hi = std::max(hi, ratio);
    worst_k = std::max(worst_k, std::fabs(ratio / k - 1.0));
  }
  const double worst_spread = (hi - lo) / hi;
  const bool ok = worst_spread <= 1e-6 && worst_k <= 1e-6;
  return {ok, "K " + fmt("%.12f", k) + ", spread of J/delta^2 " + fmt("%.2e", worst_spread) +
                  ", max |J/delta^2/K - 1| " + fmt("%.2e", worst_k)};
}

Outcome degeneracy() {
  const RateReport h =
      rate_irreversible(torus_density("function-of-u", 128), torus(), rotation(1.0), 0.5);
  const RateReport s =
      rate_irreversible(torus_density("shifted-gibbs", 128), torus(), rotation(1.0), 0.5);
  const bool ok = h.J_C <= 1e-8 && s.J_C > 1e-4;
  return {ok, "J_C(h(U)) " + fmt("%.2e", h.J_C) + ", J_C(shifted) " + fmt("%.6f", s.J_C)};
}

Outcome invariant_zero() {
  const GridDensity p = torus_density("gibbs", 128);
  double worst = 0.0;
  for (double delta : {0.0, 1.0, 10.0})
    worst = std::max(worst, rate_irreversible(p, torus(), rotation(delta), 0.5).I_C);
  return {worst <= 1e-8, "max I_C over delta in {0,1,10} " + fmt("%.2e", worst)};
}

SdeConfig circle_sde(double delta, std::uint64_t seed) {
  SdeConfig c;
  c.potential = "flat";
  c.drift.kind = "constant";
  c.drift.delta = delta;
  c.diffusion = 1.0;
  c.dt = 1e-3;
  c.horizon = 2000.0;
  c.seed = seed;
  c.stream_id = 5;
  return c;
}

Outcome spectral_gap() {
  const GeneratorSpectrum s0 = generator_spectrum(256, 0.0, 1.0);
  double gap_dev = 0.0;
  for (double delta : {1.0, 2.0, 4.0}) {
    const GeneratorSpectrum s = generator_spectrum(256, delta, 1.0);
    for (std::size_t i = 0; i < s0.eigenvalues.size(); ++i)
      gap_dev = std::max(gap_dev, std::fabs(s.eigenvalues[i].real() - s0.eigenvalues[i].real()));
  }
  const FourierObservable f = FourierObservable::cosine();
  double sig_dev = 0.0, prev = 1e300;
  bool decreasing = true;
  for (double delta : {0.0, 1.0, 2.0, 4.0}) {
    const double s2 = fourier_sigma2(f, delta, 1.0);
    sig_dev = std::max(sig_dev, std::fabs(s2 - 1.0 / (1.0 + delta * delta)));
    decreasing = decreasing && s2 < prev;
    prev = s2;
  }
  const Observable cosx = make_observable("cos");
  double mc_dev = 0.0;
  std::string mc;
  for (double delta : {0.0, 2.0}) {
    double sum = 0.0;
    const int reps = 8;
    for (int r = 0; r < reps; ++r)
      sum += asymptotic_variance_estimate(simulate_observable(circle_sde(delta, 100 + r), cosx), 50,
                                          5.0, VarianceMethod::batch_scaled);
    const double est = sum / reps;
    const double want = 1.0 / (1.0 + delta * delta);
    mc_dev = std::max(mc_dev, std::fabs(est / want - 1.0));
    mc += fmt(" MC(delta=%g)", delta) + fmt(" %.4f", est) + fmt(" vs %.4f", want);
  }
  const bool ok = gap_dev <= 1e-10 && sig_dev <= 1e-14 && decreasing && mc_dev <= 0.15;
  return {ok, "real-part spread " + fmt("%.1e", gap_dev) + ", sigma2 vs 1/(1+delta^2) " +
                  fmt("%.1e", sig_dev) + (decreasing ? ", decreasing," : ", NOT decreasing,") +
                  mc + fmt(", max rel dev %.3f", mc_dev)};
}

Outcome curvature_identity() {
  const FourierObservable f = FourierObservable::cosine();
  const std::vector<double> samples = f.sample(256);
  double worst_literal = 0.0, worst_corrected = 0.0;
  std::string detail;
  for (double delta : {0.0, 1.0, 2.0, 4.0}) {
    const Curvature k = rate_curvature(samples, delta, 1.0);
    const double s2 = fourier_sigma2(f, delta, 1.0);
    const double literal = 1.0 / (2.0 * k.curvature);
    worst_literal = std::max(worst_literal, std::fabs(literal / s2 - 1.0));
    worst_corrected = std::max(worst_corrected, std::fabs(1.0 / k.curvature / s2 - 1.0));
    detail += fmt(" delta=%g:", delta) + fmt(" 1/(2I'')=%.5f", literal) + fmt(" sigma2=%.5f", s2);
  }
  return {worst_literal <= 0.02,
          "max rel dev of 1/(2I'') " + fmt("%.3f", worst_literal) + ";" + detail +
              "; 1/I'' = sigma2 holds to " + fmt("%.1e", worst_corrected)};
}

Outcome rate_increase() {
  const std::vector<double> samples = FourierObservable::cosine().sample(256);
  const std::vector<double> ell{-0.6, -0.3, 0.3, 0.6};
  const std::vector<RatePoint> r0 = observable_rate(samples, 0.0, 1.0, ell);
  const std::vector<RatePoint> r4 = observable_rate(samples, 4.0, 1.0, ell);
  double margin = 1e300;
  std::string detail;
  for (std::size_t i = 0; i < ell.size(); ++i) {
    margin = std::min(margin, r4[i].rate - r0[i].rate);
    detail += fmt(" l=%g:", ell[i]) + fmt(" %.5f", r0[i].rate) + fmt(" -> %.5f", r4[i].rate);
  }
  return {margin > 1e-6, "min margin " + fmt("%.4f", margin) + ";" + detail};
}

Outcome table_ratios() {
  const std::vector<std::uint64_t> seeds{1, 2, 3, 4, 5};
  const TableComparison t1 = reproduce_table(1, 1.0, seeds);
  const TableComparison t2 = reproduce_table(2, 1.0, seeds);
  const TableComparison t3 = reproduce_table(3, 1.0, seeds);
  const double r1_10 = t1.cell(10.0, 295.0).measured_ratio;
  const double r1_100 = t1.cell(100.0, 295.0).measured_ratio;
  const double r2 = t2.cell(10.0, 700.0).measured_ratio;
  const double r3 = t3.cell(10.0, 700.0).measured_ratio;
  int banded = 0, cells = 0;
  for (const TableComparison* t : {&t1, &t2, &t3})
    for (const TableCell& c : t->cells)
      if (c.delta != 0.0) {
        ++cells;
        banded += c.ratio_check;
      }
  const bool ok = r1_10 >= 3.0 && r1_100 >= 25.0 && r2 >= 10.0 && r3 >= 3.0 &&
                  t1.failures.empty() && t2.failures.empty() && t3.failures.empty();
  return {ok, "T1 t=295 0:10 " + fmt("%.1f", r1_10) + " 0:100 " + fmt("%.1f", r1_100) +
                  ", T2 t=700 0:10 " + fmt("%.1f", r2) + ", T3 t=700 0:10 " + fmt("%.1f", r3) +
                  "; cells within factor 3 of printed ratio: " + std::to_string(banded) + "/" +
                  std::to_string(cells)};
}

Outcome ci_coverage() {
  const Observable f = make_observable("sumsq");
  const int reps = 200;
  int covered = 0;
  for (int r = 0; r < reps; ++r) {
    SdeConfig c;
    c.potential = "quadratic";
    c.diffusion = 0.1;
    c.dt = 1e-3;
    c.horizon = 200.0;
    c.seed = 5000 + static_cast<std::uint64_t>(r);
    c.stream_id = 9;
    const BatchMeansReport rep =
        batch_means(simulate_observable(c, f), batch_count_schedule(200.0), 0.05, 5.0);
    covered += rep.ci_lower <= 0.2 && 0.2 <= rep.ci_upper;
  }
  const double rate = static_cast<double>(covered) / reps;
  return {rate >= 0.88, "coverage of 2D = 0.2: " + std::to_string(covered) + "/200"};
}

Outcome cli_determinism() {
  const fs::path root = fs::temp_directory_path() / "irrl_acceptance_cli";
  fs::remove_all(root);
  fs::create_directories(root);
  {
    std::ofstream cfg(root / "experiment.json");
    cfg << R"({"potential": "bimodal1", "drift": {"kind": "rotational", "delta": [0, 10]},
               "D": 0.1, "dt": 0.001, "t": 30, "v": 5, "checkpoints": [15, 30],
               "observable": "sumsq", "seeds": [1, 2, 3], "integrator": "rk4-split",
               "sweep_points": 10})";
  }
  const std::string cli = IRRL_CLI_PATH;
  const std::vector<std::string> commands{
      "estimate --config " + (root / "experiment.json").string(),
      "sweep --config " + (root / "experiment.json").string(),
      "ratefn --density shifted-gibbs --delta 1 --grid 32",
      "spectral --delta 0,2 --grid 128",
      "reproduce-table --table 1 --scale 0.1 --seeds 1,2",
  };
  std::size_t compared = 0;
  for (std::size_t i = 0; i < commands.size(); ++i) {
    for (const char* run : {"a", "b"}) {
      const fs::path out = root / (std::to_string(i) + run);
      const std::string cmd = cli + " " + commands[i] + " --out " + out.string() + " > " +
                              (root / "log.txt").string() + " 2>&1";
      if (std::system(cmd.c_str()) != 0) return {false, "command failed: " + commands[i]};
    }
    const fs::path a = root / (std::to_string(i) + "a");
    for (const auto& entry : fs::directory_iterator(a)) {
      const std::string name = entry.path().filename().string();
      if (name == "manifest.json") continue;
      const fs::path b = root / (std::to_string(i) + "b") / name;
      if (!fs::exists(b) || slurp(entry.path()) != slurp(b))
        return {false, "differs: " + commands[i] + " -> " + name};
      ++compared;
    }
  }
  return {compared >= 10, std::to_string(compared) + " data files byte-identical across reruns"};
}

}  // namespace

int main() {
  run(1, "circle closed-form rate", 1.0, circle_closed_form);
  run(2, "quadratic law J = delta^2 K (N=128)", 30.0, quadratic_law);
  run(3, "degeneracy iff p = h(U)", 30.0, degeneracy);
  run(4, "rate vanishes at the invariant measure", 30.0, invariant_zero);
  run(5, "spectral gap invariance vs variance decrease", 120.0, spectral_gap);
  run(6, "curvature identity 1/(2I'') = sigma2 (as stated)", 120.0, curvature_identity);
  run(7, "observable rate increases with drift", 120.0, rate_increase);
  run(8, "table variance ratios (5 seeds, full horizons)", 1800.0, table_ratios);
  run(9, "batch-means CI coverage on OU", 300.0, ci_coverage);
  run(10, "CLI determinism", 300.0, cli_determinism);
  std::printf("%d of 10 criteria failed\n", failures);
  return failures == 0 ? 0 : 1;
}
