#include "irrl/trajectory_io.hpp"

#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>

#include "irrl/config.hpp"
#include "irrl/errors.hpp"
#include "irrl/experiment.hpp"
#include "irrl/rng.hpp"

namespace irrl {

using nlohmann::json;

namespace {

void to_little(double x, unsigned char* out) {
  std::uint64_t bits = std::bit_cast<std::uint64_t>(x);
  for (int b = 0; b < 8; ++b) out[b] = static_cast<unsigned char>(bits >> (8 * b));
}

double from_little(const unsigned char* in) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(in[b]) << (8 * b);
  return std::bit_cast<double>(bits);
}

}  // namespace

void write_trajectory(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'");
  const json header = {{"format", "irrl-trajectory"},
                       {"version", std::string(version)},
                       {"rng", std::string(NormalStream::algorithm_id)},
                       {"dimension", traj.dimension()},
                       {"rows", traj.size()},
                       {"config", to_json(traj.config())}};
  out << header.dump() << '\n';
  std::vector<unsigned char> buf(traj.data().size() * 8);
  for (std::size_t i = 0; i < traj.data().size(); ++i) to_little(traj.data()[i], &buf[8 * i]);
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) throw ConfigError("write to '" + path.string() + "' failed");
}

TrajectoryFile read_trajectory(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open trajectory '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) throw ConfigError("trajectory header missing");
  json header;
  try {
    header = json::parse(line);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("trajectory header: ") + e.what());
  }
  if (header.value("format", "") != "irrl-trajectory")
    throw ConfigError("not a trajectory file");
  std::size_t dim = 0;
  std::size_t rows = 0;
  SdeConfig config;
  try {
    dim = header.at("dimension").get<std::size_t>();
    rows = header.at("rows").get<std::size_t>();
    const json& c = header.at("config");
    config.potential = c.at("potential").at("name").get<std::string>();
    for (const auto& item : c.at("potential").at("params").items())
      config.potential_params[item.key()] = item.value().get<double>();
    config.drift.kind = c.at("drift").at("kind").get<std::string>();
    config.drift.delta = c.at("drift").at("delta").get<double>();
    config.drift.matrix = c.at("drift").value("matrix", std::vector<std::vector<double>>{});
    config.drift.direction = c.at("drift").value("direction", std::vector<double>{});
    config.drift.wedge_factor = c.at("drift").value("wedge_factor", std::vector<double>{});
    config.diffusion = c.at("D").get<double>();
    config.dt = c.at("dt").get<double>();
    config.horizon = c.at("t").get<double>();
    config.initial = c.at("initial").get<std::vector<double>>();
    config.seed = c.at("seed").get<std::uint64_t>();
    config.stream_id = c.at("stream_id").get<std::uint32_t>();
    config.integrator = integrator_from_string(c.at("integrator").get<std::string>());
  } catch (const json::exception& e) {
    throw ConfigError(std::string("trajectory header: ") + e.what());
  } catch (const ParameterError& e) {
    throw ConfigError(std::string("trajectory header: ") + e.what());
  }
  if (dim == 0) throw ConfigError("trajectory dimension is zero");
  std::vector<unsigned char> buf(rows * dim * 8);
  in.read(reinterpret_cast<char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (static_cast<std::size_t>(in.gcount()) != buf.size())
    throw ConfigError("trajectory body truncated");
  std::vector<double> states(rows * dim);
  for (std::size_t i = 0; i < states.size(); ++i) states[i] = from_little(&buf[8 * i]);
  return {std::move(header), Trajectory(std::move(config), dim, std::move(states))};
}

}  // namespace irrl
