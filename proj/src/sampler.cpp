#include "irrl/sampler.hpp"

#include <array>
#include <cmath>

#include "irrl/errors.hpp"
#include "irrl/rng.hpp"

namespace irrl {

std::string to_string(Integrator integrator) {
  switch (integrator) {
    case Integrator::euler_maruyama: return "euler";
    case Integrator::rk4_split: return "rk4-split";
  }
  return "unknown";
}

Integrator integrator_from_string(const std::string& name) {
  if (name == "euler" || name == "euler-maruyama") return Integrator::euler_maruyama;
  if (name == "rk4-split") return Integrator::rk4_split;
  throw ParameterError("unknown integrator '" + name + "'");
}

std::size_t SdeConfig::steps() const {
  return static_cast<std::size_t>(std::floor(horizon / dt + 1e-9));
}

void SdeConfig::validate() const {
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ParameterError("dt must be positive and finite");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ParameterError("horizon must be positive");
  if (dt > horizon * (1.0 + 1e-12)) throw ParameterError("dt must not exceed the horizon");
  if (!(diffusion >= 0.0) || !std::isfinite(diffusion))
    throw ParameterError("diffusion D must be non-negative");
  for (double v : initial)
    if (!std::isfinite(v)) throw ParameterError("initial state must be finite");
}

DriftField build_drift(const DriftSpec& spec, const PotentialField& u) {
  const std::size_t d = u.dimension();
  if (spec.kind == "rotational") {
    if (spec.matrix.empty()) {
      if (d < 2) throw ParameterError("rotational drift needs dimension >= 2");
      return make_rotational_drift(AntisymmetricMatrix::standard(d), u, spec.delta);
    }
    return make_rotational_drift(AntisymmetricMatrix(spec.matrix), u, spec.delta);
  }
  if (spec.kind == "wedge") {
    WedgeRecipe recipe;
    if (d == 3) {
      std::vector<double> a = spec.wedge_factor.empty() ? std::vector<double>{1.0, 0.0, 0.0}
                                                        : spec.wedge_factor;
      if (a.size() != 3) throw ParameterError("wedge factor needs 3 coefficients");
      recipe.factors.emplace_back(
          "linear", 3, std::vector<double>{},
          [a](std::span<const double> x) { return a[0] * x[0] + a[1] * x[1] + a[2] * x[2]; },
          [a](std::span<const double>, std::span<double> g) {
            g[0] = a[0];
            g[1] = a[1];
            g[2] = a[2];
          },
          [](std::span<const double>) { return 0.0; });
    }
    return make_wedge_drift(recipe, u, spec.delta);
  }
  if (spec.kind == "constant") {
    std::vector<double> c = spec.direction;
    if (c.empty()) {
      c.assign(d, 0.0);
      c[0] = 1.0;
    }
    if (c.size() != d) throw ParameterError("constant drift direction has wrong dimension");
    return make_constant_drift(std::move(c), spec.delta);
  }
  throw ParameterError("unknown drift kind '" + spec.kind + "'");
}

SdeSystem build_system(const SdeConfig& config) {
  PotentialField u = make_potential(config.potential, config.potential_params);
  DriftField c = build_drift(config.drift, u);
  return {std::move(u), std::move(c)};
}

namespace {

constexpr std::size_t kMaxStackDim = 8;

// b(x) = -grad U(x) + C(x)
inline void total_drift(std::span<const double> x, const PotentialField& u, const DriftField& c,
                        std::span<double> out, std::span<double> scratch) {
  u.gradient_unchecked(x, out);
  c.evaluate_unchecked(x, scratch);
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = scratch[i] - out[i];
}

void check_finite(std::span<const double> v, const char* what) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!std::isfinite(v[i]))
      throw NumericError(std::string("non-finite ") + what + " at coordinate " + std::to_string(i), i);
}

struct Scratch {
  std::vector<double> heap;
  std::array<double, 6 * kMaxStackDim> stack{};
  std::span<double> get(std::size_t d, std::size_t k) {
    if (d <= kMaxStackDim) return {stack.data() + k * kMaxStackDim, d};
    if (heap.size() < 6 * d) heap.resize(6 * d);
    return {heap.data() + k * d, d};
  }
};

void em_step_unchecked(std::span<const double> x, const PotentialField& u, const DriftField& c,
                       double amp, double dt, std::span<const double> noise, std::span<double> out,
                       Scratch& s) {
  const std::size_t d = x.size();
  auto b = s.get(d, 0);
  auto tmp = s.get(d, 1);
  total_drift(x, u, c, b, tmp);
  for (std::size_t i = 0; i < d; ++i) out[i] = x[i] + b[i] * dt + amp * noise[i];
}

void rk4_unchecked(std::span<const double> x, const PotentialField& u, const DriftField& c,
                   double amp, double dt, std::span<const double> noise, std::span<double> out,
                   Scratch& s) {
  const std::size_t d = x.size();
  auto k1 = s.get(d, 0), k2 = s.get(d, 1), k3 = s.get(d, 2), k4 = s.get(d, 3);
  auto y = s.get(d, 4), tmp = s.get(d, 5);
  total_drift(x, u, c, k1, tmp);
  for (std::size_t i = 0; i < d; ++i) y[i] = x[i] + 0.5 * dt * k1[i];
  total_drift(y, u, c, k2, tmp);
  for (std::size_t i = 0; i < d; ++i) y[i] = x[i] + 0.5 * dt * k2[i];
  total_drift(y, u, c, k3, tmp);
  for (std::size_t i = 0; i < d; ++i) y[i] = x[i] + dt * k3[i];
  total_drift(y, u, c, k4, tmp);
  for (std::size_t i = 0; i < d; ++i)
    out[i] = x[i] + dt * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]) / 6.0 + amp * noise[i];
}

void check_step_args(std::span<const double> state, const PotentialField& u, const DriftField& c,
                     std::span<const double> noise, std::span<double> out) {
  const std::size_t d = u.dimension();
  if (state.size() != d || noise.size() != d || out.size() != d || c.dimension() != d)
    throw ParameterError("step dimension mismatch");
  check_finite(state, "state");
  check_finite(noise, "noise");
}

}  // namespace

void em_step(std::span<const double> state, const PotentialField& u, const DriftField& c,
             double diffusion, double dt, std::span<const double> noise, std::span<double> out) {
  check_step_args(state, u, c, noise, out);
  Scratch s;
  em_step_unchecked(state, u, c, std::sqrt(2.0 * diffusion * dt), dt, noise, out, s);
}

std::vector<double> em_step(std::span<const double> state, const PotentialField& u,
                            const DriftField& c, double diffusion, double dt,
                            std::span<const double> noise) {
  std::vector<double> out(state.size());
  em_step(state, u, c, diffusion, dt, noise, out);
  return out;
}

void rk4_split_step(std::span<const double> state, const PotentialField& u, const DriftField& c,
                    double diffusion, double dt, std::span<const double> noise,
                    std::span<double> out) {
  check_step_args(state, u, c, noise, out);
  Scratch s;
  rk4_unchecked(state, u, c, std::sqrt(2.0 * diffusion * dt), dt, noise, out, s);
}

Trajectory::Trajectory(SdeConfig config, std::size_t dimension, std::vector<double> states)
    : config_(std::move(config)), dim_(dimension), states_(std::move(states)) {
  if (dim_ == 0 || states_.size() % dim_ != 0)
    throw ParameterError("trajectory storage does not match its dimension");
}

TimeSeries Trajectory::observe(const Observable& f) const {
  TimeSeries ts;
  ts.dt = config_.dt;
  const std::size_t n = size();
  ts.values.resize(n > 0 ? n - 1 : 0);
  for (std::size_t i = 0; i + 1 < n; ++i) ts.values[i] = f.eval(state(i));
  return ts;
}

void simulate_stream(const SdeConfig& config, const StateVisitor& visit) {
  config.validate();
  const SdeSystem sys = build_system(config);
  const std::size_t d = sys.potential.dimension();
  if (!config.initial.empty() && config.initial.size() != d)
    throw ParameterError("initial state has wrong dimension");

  std::vector<double> x = config.initial.empty() ? std::vector<double>(d, 0.0) : config.initial;
  std::vector<double> next(d), noise(d, 0.0);
  const NormalStream rng(config.seed, config.stream_id);
  const double amp = std::sqrt(2.0 * config.diffusion * config.dt);
  const bool stochastic = config.diffusion > 0.0;
  const std::size_t n = config.steps();
  Scratch s;

  visit(0, x);
  for (std::size_t k = 0; k < n; ++k) {
    if (stochastic) rng.fill(k, noise);
    if (config.integrator == Integrator::euler_maruyama)
      em_step_unchecked(x, sys.potential, sys.drift, amp, config.dt, noise, next, s);
    else
      rk4_unchecked(x, sys.potential, sys.drift, amp, config.dt, noise, next, s);
    for (std::size_t i = 0; i < d; ++i)
      if (!std::isfinite(next[i]))
        throw NumericError("non-finite state at step " + std::to_string(k + 1) +
                               " (dt too large for the drift stiffness?)",
                           k + 1);
    sys.potential.wrap(next);
    x.swap(next);
    visit(k + 1, x);
  }
}

Trajectory simulate(const SdeConfig& config) {
  config.validate();
  const std::size_t d = make_potential(config.potential, config.potential_params).dimension();
  std::vector<double> states;
  states.reserve((config.steps() + 1) * d);
  simulate_stream(config, [&](std::size_t, std::span<const double> x) {
    states.insert(states.end(), x.begin(), x.end());
  });
  return Trajectory(config, d, std::move(states));
}

TimeSeries simulate_observable(const SdeConfig& config, const Observable& f) {
  TimeSeries ts;
  ts.dt = config.dt;
  const std::size_t n = config.steps();
  ts.values.reserve(n);
  simulate_stream(config, [&](std::size_t i, std::span<const double> x) {
    if (i < n) ts.values.push_back(f.eval(x));
  });
  return ts;
}

}  // namespace irrl
