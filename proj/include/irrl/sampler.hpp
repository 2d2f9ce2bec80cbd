#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "irrl/drift.hpp"
#include "irrl/field.hpp"
#include "irrl/observable.hpp"

namespace irrl {

/// Declarative drift description as it appears in configs.
struct DriftSpec {
  std::string kind = "rotational";  ///< rotational | wedge | constant
  double delta = 0.0;
  std::vector<std::vector<double>> matrix;  ///< rotational S; empty = standard J
  std::vector<double> direction;            ///< constant drift vector; empty = e_0
  std::vector<double> wedge_factor;         ///< d = 3: V2(x) = a . x; empty = e_0
};

enum class Integrator {
  euler_maruyama,  ///< X + b(X) dt + sqrt(2 D dt) xi
  rk4_split,       ///< RK4 step of dX = b(X) dt, then the same additive noise increment
};

std::string to_string(Integrator integrator);
Integrator integrator_from_string(const std::string& name);

struct SdeConfig {
  std::string potential = "quadratic";
  PotentialParams potential_params;
  DriftSpec drift;
  double diffusion = 0.1;
  double dt = 1e-3;
  double horizon = 1.0;
  std::vector<double> initial;  ///< empty = origin
  std::uint64_t seed = 0;
  std::uint32_t stream_id = 0;
  Integrator integrator = Integrator::euler_maruyama;

  /// Number of steps, floor(horizon / dt).
  std::size_t steps() const;
  /// Throws ParameterError on dt > horizon, D < 0, non-positive dt, etc.
  void validate() const;
};

struct SdeSystem {
  PotentialField potential;
  DriftField drift;
};

DriftField build_drift(const DriftSpec& spec, const PotentialField& u);
SdeSystem build_system(const SdeConfig& config);

/// state + (-grad U + C)(state) dt + sqrt(2 D dt) noise.
/// Throws NumericError (index = coordinate) on non-finite state or noise.
void em_step(std::span<const double> state, const PotentialField& u, const DriftField& c,
             double diffusion, double dt, std::span<const double> noise, std::span<double> out);
std::vector<double> em_step(std::span<const double> state, const PotentialField& u,
                            const DriftField& c, double diffusion, double dt,
                            std::span<const double> noise);

void rk4_split_step(std::span<const double> state, const PotentialField& u, const DriftField& c,
                    double diffusion, double dt, std::span<const double> noise,
                    std::span<double> out);

/// Materialized sample path: steps() + 1 states, row-major.
class Trajectory {
 public:
  Trajectory(SdeConfig config, std::size_t dimension, std::vector<double> states);

  const SdeConfig& config() const noexcept { return config_; }
  std::size_t dimension() const noexcept { return dim_; }
  std::size_t size() const noexcept { return states_.size() / dim_; }
  std::span<const double> state(std::size_t i) const {
    return {states_.data() + i * dim_, dim_};
  }
  double time(std::size_t i) const noexcept { return config_.dt * static_cast<double>(i); }
  const std::vector<double>& data() const noexcept { return states_; }

  /// f at every state except the last (left-Riemann samples).
  TimeSeries observe(const Observable& f) const;

 private:
  SdeConfig config_;
  std::size_t dim_;
  std::vector<double> states_;
};

using StateVisitor = std::function<void(std::size_t index, std::span<const double> state)>;

/// Visit states 0..steps() in order without storing them.
/// Throws NumericError with the step index of the first non-finite state.
void simulate_stream(const SdeConfig& config, const StateVisitor& visit);

Trajectory simulate(const SdeConfig& config);

/// Streamed observable series; the trajectory is never materialized.
TimeSeries simulate_observable(const SdeConfig& config, const Observable& f);

}  // namespace irrl
