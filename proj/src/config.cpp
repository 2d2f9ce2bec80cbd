#include "irrl/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>
#include <initializer_list>
#include <set>

#include "irrl/errors.hpp"
#include "irrl/estimators.hpp"
#include "irrl/observable.hpp"
#include "irrl/rng.hpp"

namespace irrl {

using nlohmann::json;

namespace {

void require_keys(const json& j, const std::string& where,
                  std::initializer_list<const char*> allowed) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& item : j.items())
    if (!ok.contains(item.key())) throw ConfigError(where + ": unknown key '" + item.key() + "'");
}

double get_number(const json& j, const std::string& key) {
  if (!j.at(key).is_number()) throw ConfigError("'" + key + "' must be a number");
  return j.at(key).get<double>();
}

std::string get_string(const json& j, const std::string& key) {
  if (!j.at(key).is_string()) throw ConfigError("'" + key + "' must be a string");
  return j.at(key).get<std::string>();
}

std::vector<double> get_numbers(const json& j, const std::string& key) {
  const json& v = j.at(key);
  if (v.is_number()) return {v.get<double>()};
  if (!v.is_array()) throw ConfigError("'" + key + "' must be a number or a list of numbers");
  std::vector<double> out;
  for (const json& x : v) {
    if (!x.is_number()) throw ConfigError("'" + key + "' must contain numbers only");
    out.push_back(x.get<double>());
  }
  return out;
}

std::size_t get_count(const json& j, const std::string& key) {
  const json& v = j.at(key);
  if (!v.is_number_integer() || v.get<long long>() <= 0)
    throw ConfigError("'" + key + "' must be a positive integer");
  return v.get<std::size_t>();
}

void parse_potential(const json& j, std::string& name, PotentialParams& params) {
  const json& p = j.at("potential");
  if (p.is_string()) {
    name = p.get<std::string>();
    return;
  }
  require_keys(p, "potential", {"name", "params"});
  name = get_string(p, "name");
  if (p.contains("params")) {
    if (!p["params"].is_object()) throw ConfigError("potential.params must be an object");
    for (const auto& item : p["params"].items()) {
      if (!item.value().is_number())
        throw ConfigError("potential parameter '" + item.key() + "' must be a number");
      params[item.key()] = item.value().get<double>();
    }
  }
}

json potential_json(const std::string& name, const PotentialParams& params) {
  json p = {{"name", name}, {"params", json::object()}};
  for (const auto& [k, v] : params) p["params"][k] = v;
  return p;
}

DriftSpec parse_drift(const json& d, std::vector<double>* deltas) {
  require_keys(d, "drift", {"kind", "delta", "matrix", "direction", "wedge_factor"});
  DriftSpec spec;
  if (d.contains("kind")) spec.kind = get_string(d, "kind");
  if (d.contains("delta")) {
    std::vector<double> list = get_numbers(d, "delta");
    if (deltas) {
      *deltas = list;
    } else {
      if (list.size() != 1) throw ConfigError("drift.delta must be a single number here");
      spec.delta = list[0];
    }
  }
  if (d.contains("matrix")) {
    try {
      spec.matrix = d["matrix"].get<std::vector<std::vector<double>>>();
    } catch (const json::exception&) {
      throw ConfigError("drift.matrix must be a list of rows");
    }
  }
  if (d.contains("direction")) spec.direction = get_numbers(d, "direction");
  if (d.contains("wedge_factor")) spec.wedge_factor = get_numbers(d, "wedge_factor");
  return spec;
}

json drift_json(const DriftSpec& spec, const json& delta) {
  json d = {{"kind", spec.kind}, {"delta", delta}};
  if (!spec.matrix.empty()) d["matrix"] = spec.matrix;
  if (!spec.direction.empty()) d["direction"] = spec.direction;
  if (!spec.wedge_factor.empty()) d["wedge_factor"] = spec.wedge_factor;
  return d;
}

void check_potential(const std::string& name, const PotentialParams& params) {
  try {
    (void)make_potential(name, params);
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("potential: ") + e.what());
  }
}

}  // namespace

std::vector<double> ExperimentConfig::resolved_checkpoints() const {
  std::vector<double> out = checkpoints.empty() ? std::vector<double>{t} : checkpoints;
  std::sort(out.begin(), out.end());
  return out;
}

int ExperimentConfig::batch_count(double checkpoint) const {
  return m > 0 ? m : batch_count_schedule(checkpoint);
}

void ExperimentConfig::validate() const {
  check_potential(potential, potential_params);
  if (deltas.empty()) throw ConfigError("drift.delta list is empty");
  if (seeds.empty()) throw ConfigError("seed list is empty");
  for (double d : deltas)
    if (!std::isfinite(d)) throw ConfigError("drift.delta must be finite");
  if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("dt must be positive");
  if (!(diffusion >= 0.0) || !std::isfinite(diffusion)) throw ConfigError("D must be >= 0");
  if (!(v >= 0.0)) throw ConfigError("burn-in v must be >= 0");
  if (!(t > v) || !std::isfinite(t)) throw ConfigError("t must exceed the burn-in v");
  if (!(alpha > 0.0 && alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  if (m < 0 || m == 1) throw ConfigError("m_schedule must be 'auto' or an integer >= 2");
  if (sweep_points < 1) throw ConfigError("sweep_points must be positive");
  for (double c : resolved_checkpoints())
    if (!(c > v) || c > t * (1.0 + 1e-12))
      throw ConfigError("checkpoints must lie in (v, t]");
  try {
    (void)make_observable(observable);
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("observable: ") + e.what());
  }
  try {
    SdeSystem sys = build_system(to_sde_config(*this, deltas.front(), seeds.front()));
    if (!initial.empty() && initial.size() != sys.potential.dimension())
      throw ConfigError("initial state has the wrong dimension");
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("drift: ") + e.what());
  }
}

ExperimentConfig parse_experiment_config(const json& j) {
  require_keys(j, "config",
               {"potential", "drift", "D", "dt", "t", "v", "checkpoints", "m_schedule", "alpha",
                "observable", "seeds", "initial", "integrator", "sweep_points", "outputs"});
  ExperimentConfig c;
  try {
    if (j.contains("potential")) parse_potential(j, c.potential, c.potential_params);
    if (j.contains("drift")) c.drift = parse_drift(j["drift"], &c.deltas);
    if (j.contains("D")) c.diffusion = get_number(j, "D");
    if (j.contains("dt")) c.dt = get_number(j, "dt");
    if (j.contains("t")) c.t = get_number(j, "t");
    if (j.contains("v")) c.v = get_number(j, "v");
    if (j.contains("checkpoints")) c.checkpoints = get_numbers(j, "checkpoints");
    if (j.contains("m_schedule")) {
      const json& m = j["m_schedule"];
      if (m.is_string() && m.get<std::string>() == "auto") {
        c.m = 0;
      } else if (m.is_number_integer()) {
        c.m = m.get<int>();
      } else {
        throw ConfigError("m_schedule must be 'auto' or an integer");
      }
    }
    if (j.contains("alpha")) c.alpha = get_number(j, "alpha");
    if (j.contains("observable")) c.observable = get_string(j, "observable");
    if (j.contains("seeds")) {
      if (!j["seeds"].is_array()) throw ConfigError("seeds must be a list");
      c.seeds.clear();
      for (const json& s : j["seeds"]) {
        if (!s.is_number_unsigned()) throw ConfigError("seeds must be non-negative integers");
        c.seeds.push_back(s.get<std::uint64_t>());
      }
    }
    if (j.contains("initial")) c.initial = get_numbers(j, "initial");
    if (j.contains("integrator")) c.integrator = integrator_from_string(get_string(j, "integrator"));
    if (j.contains("sweep_points")) c.sweep_points = static_cast<int>(get_count(j, "sweep_points"));
    if (j.contains("outputs")) c.outputs = get_string(j, "outputs");
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  c.validate();
  return c;
}

json read_json_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config '" + path.string() + "': " + e.what());
  }
}

ExperimentConfig load_experiment_config(const std::filesystem::path& path) {
  return parse_experiment_config(read_json_file(path));
}

json to_json(const ExperimentConfig& c) {
  json j;
  j["potential"] = potential_json(c.potential, c.potential_params);
  j["drift"] = drift_json(c.drift, c.deltas);
  j["D"] = c.diffusion;
  j["dt"] = c.dt;
  j["t"] = c.t;
  j["v"] = c.v;
  j["checkpoints"] = c.resolved_checkpoints();
  j["m_schedule"] = c.m > 0 ? json(c.m) : json("auto");
  j["alpha"] = c.alpha;
  j["observable"] = c.observable;
  j["seeds"] = c.seeds;
  j["initial"] = c.initial;
  j["integrator"] = to_string(c.integrator);
  j["sweep_points"] = c.sweep_points;
  j["outputs"] = c.outputs.string();
  return j;
}

RateConfig parse_rate_config(const json& j) {
  require_keys(j, "config",
               {"density", "potential", "drift", "D", "grid", "dims", "scheme", "compute_K",
                "outputs"});
  RateConfig c;
  c.drift.delta = 1.0;
  try {
    if (j.contains("potential")) parse_potential(j, c.potential, c.potential_params);
    if (j.contains("drift")) c.drift = parse_drift(j["drift"], nullptr);
    if (j.contains("D")) c.diffusion = get_number(j, "D");
    if (j.contains("grid")) c.grid = get_count(j, "grid");
    if (j.contains("dims")) c.dims = get_count(j, "dims");
    if (j.contains("scheme")) c.scheme = discretization_from_string(get_string(j, "scheme"));
    if (j.contains("compute_K")) {
      if (!j["compute_K"].is_boolean()) throw ConfigError("compute_K must be a boolean");
      c.compute_K = j["compute_K"].get<bool>();
    }
    if (j.contains("outputs")) c.outputs = get_string(j, "outputs");
    c.density.potential = c.potential;
    c.density.potential_params = c.potential_params;
    c.density.diffusion = c.diffusion;
    if (j.contains("density")) {
      const json& d = j["density"];
      if (d.is_string()) {
        c.density.name = d.get<std::string>();
      } else {
        require_keys(d, "density",
                     {"name", "kappa", "shift", "amplitude", "coefficient_scale", "seed", "path"});
        if (d.contains("name")) c.density.name = get_string(d, "name");
        if (d.contains("kappa")) c.density.kappa = get_number(d, "kappa");
        if (d.contains("shift")) c.density.shift = get_number(d, "shift");
        if (d.contains("amplitude")) c.density.amplitude = get_number(d, "amplitude");
        if (d.contains("coefficient_scale"))
          c.density.coefficient_scale = get_number(d, "coefficient_scale");
        if (d.contains("seed")) {
          if (!d["seed"].is_number_unsigned()) throw ConfigError("density.seed must be an integer");
          c.density.seed = d["seed"].get<std::uint64_t>();
        }
        if (d.contains("path")) c.density.path = get_string(d, "path");
      }
    }
  } catch (const ParameterError& e) {
    throw ConfigError(e.what());
  }
  if (!(c.diffusion > 0.0)) throw ConfigError("D must be positive");
  check_potential(c.potential, c.potential_params);
  return c;
}

json to_json(const RateConfig& c) {
  json d = {{"name", c.density.name},
            {"kappa", c.density.kappa},
            {"shift", c.density.shift},
            {"amplitude", c.density.amplitude},
            {"coefficient_scale", c.density.coefficient_scale},
            {"seed", c.density.seed},
            {"path", c.density.path}};
  return {{"density", d},
          {"potential", potential_json(c.potential, c.potential_params)},
          {"drift", drift_json(c.drift, c.drift.delta)},
          {"D", c.diffusion},
          {"grid", c.grid},
          {"dims", c.dims},
          {"scheme", to_string(c.scheme)},
          {"compute_K", c.compute_K},
          {"outputs", c.outputs.string()}};
}

SpectralConfig parse_spectral_config(const json& j) {
  require_keys(j, "config", {"delta", "D", "grid", "observable", "ell", "outputs"});
  SpectralConfig c;
  if (j.contains("delta")) c.deltas = get_numbers(j, "delta");
  if (j.contains("D")) c.diffusion = get_number(j, "D");
  if (j.contains("grid")) c.grid = get_count(j, "grid");
  if (j.contains("observable")) c.observable = get_string(j, "observable");
  if (j.contains("ell")) c.ell = get_numbers(j, "ell");
  if (j.contains("outputs")) c.outputs = get_string(j, "outputs");
  if (c.deltas.empty()) throw ConfigError("delta list is empty");
  if (!(c.diffusion > 0.0)) throw ConfigError("D must be positive");
  return c;
}

json to_json(const SpectralConfig& c) {
  return {{"delta", c.deltas}, {"D", c.diffusion},   {"grid", c.grid},
          {"observable", c.observable}, {"ell", c.ell}, {"outputs", c.outputs.string()}};
}

std::uint32_t cell_stream_id(const std::string& potential, double delta) {
  std::vector<unsigned char> bytes(potential.begin(), potential.end());
  unsigned char raw[sizeof(double)];
  std::memcpy(raw, &delta, sizeof(double));
  bytes.insert(bytes.end(), raw, raw + sizeof(double));
  return fnv1a32(bytes);
}

SdeConfig to_sde_config(const ExperimentConfig& c, double delta, std::uint64_t seed) {
  SdeConfig s;
  s.potential = c.potential;
  s.potential_params = c.potential_params;
  s.drift = c.drift;
  s.drift.delta = delta;
  s.diffusion = c.diffusion;
  s.dt = c.dt;
  s.horizon = c.t;
  s.initial = c.initial;
  s.seed = seed;
  s.stream_id = cell_stream_id(c.potential, delta);
  s.integrator = c.integrator;
  return s;
}

json to_json(const SdeConfig& s) {
  return {{"potential", potential_json(s.potential, s.potential_params)},
          {"drift", drift_json(s.drift, s.drift.delta)},
          {"D", s.diffusion},
          {"dt", s.dt},
          {"t", s.horizon},
          {"initial", s.initial},
          {"seed", s.seed},
          {"stream_id", s.stream_id},
          {"integrator", to_string(s.integrator)}};
}

}  // namespace irrl
