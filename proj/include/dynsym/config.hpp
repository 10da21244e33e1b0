#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "dynsym/collision3d.hpp"
#include "dynsym/measurement.hpp"
#include "dynsym/semiclassical.hpp"
#include "dynsym/wavepacket.hpp"

namespace dynsym {

struct PacketConfig {
  double a = 1.0, b = 0.0, c = 0.0;
  bool operator==(const PacketConfig&) const = default;
};

struct GridConfig {
  std::optional<double> t_min, t_max;  // default: the scenario's time window
  int points = 2001;
  bool operator==(const GridConfig&) const = default;
};

struct McConfig {
  std::int64_t samples = 1000000;
  std::int64_t trajectories = 10000;
  std::uint64_t seed = 0;
  int bins = 100;
  bool operator==(const McConfig&) const = default;
};

// y and z axes of each packet for the 3D command; x comes from packets.
struct TransverseConfig {
  PacketConfig left_y, left_z, right_y, right_z;
  bool operator==(const TransverseConfig&) const = default;
};

struct ScenarioConfig {
  PacketConfig left, right;
  double mass = 1.0;
  int eta = 1;
  std::optional<Detector> detector;
  GridConfig grid;
  QuadratureControl quadrature;
  McConfig mc;
  std::optional<double> range_l;
  std::optional<TransverseConfig> transverse;

  bool operator==(const ScenarioConfig&) const = default;

  Scenario scenario() const;
  TimeWindow window() const;
  std::vector<double> time_grid() const;
  Gaussian3DPacket left3d() const;
  Gaussian3DPacket right3d() const;
  // Digest of the physical fields only: packets, mass, eta, detector,
  // range_l and transverse axes. Grid, quadrature and Monte Carlo settings
  // do not enter.
  std::string fingerprint() const;
};

// Strict YAML parse with defaults filled. Throws ConfigError carrying the
// line number for syntax and type errors, the field path for invariant
// violations, and the key name for unknown keys.
ScenarioConfig parse_config(std::string_view text);
ScenarioConfig load_config(const std::filesystem::path& path);

// Canonical YAML with every field written out; parse_config(to_yaml(c)) == c.
std::string to_yaml(const ScenarioConfig& cfg);

}  // namespace dynsym
