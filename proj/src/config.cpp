#include "dynsym/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <limits>
#include <set>
#include <sstream>

#include <fmt/format.h>
#include <yaml-cpp/yaml.h>

#include "dynsym/density_curve.hpp"
#include "dynsym/errors.hpp"

namespace dynsym {

namespace {

std::string where(const YAML::Node& n) {
  const auto m = n.Mark();
  if (m.is_null()) return "";
  return fmt::format("line {}: ", m.line + 1);
}

[[noreturn]] void fail(const YAML::Node& n, std::string_view path, std::string_view what) {
  throw ConfigError(fmt::format("{}{}: {}", where(n), path, what));
}

std::string join(std::string_view path, std::string_view key) {
  return path.empty() ? std::string(key) : fmt::format("{}.{}", path, key);
}

void expect_map(const YAML::Node& n, std::string_view path) {
  if (!n.IsMap()) fail(n, path.empty() ? "document" : path, "expected a mapping");
}

void check_keys(const YAML::Node& n, std::string_view path, std::initializer_list<std::string_view> allowed) {
  std::set<std::string> seen;
  for (const auto& kv : n) {
    const auto key = kv.first.as<std::string>();
    if (!seen.insert(key).second) fail(kv.first, join(path, key), "duplicate key");
    bool ok = false;
    for (auto a : allowed) ok = ok || key == a;
    if (!ok) fail(kv.first, join(path, key), fmt::format("unknown key '{}'", key));
  }
}

double get_double(const YAML::Node& n, std::string_view path) {
  if (!n.IsScalar()) fail(n, path, "expected a number");
  double v;
  try {
    v = n.as<double>();
  } catch (const YAML::BadConversion&) {
    fail(n, path, fmt::format("'{}' is not a number", n.Scalar()));
  }
  if (!std::isfinite(v)) fail(n, path, "must be finite");
  return v;
}

std::int64_t get_int(const YAML::Node& n, std::string_view path) {
  // accept 1e6 style as long as the value is an exact integer
  const double v = get_double(n, path);
  if (v != std::floor(v) || std::abs(v) > 9.0e15) fail(n, path, fmt::format("'{}' is not an integer", n.Scalar()));
  return static_cast<std::int64_t>(v);
}

std::uint64_t get_seed(const YAML::Node& n, std::string_view path) {
  if (!n.IsScalar()) fail(n, path, "expected a non-negative integer");
  try {
    if (!n.Scalar().empty() && n.Scalar().front() != '-') return n.as<std::uint64_t>();
  } catch (const YAML::BadConversion&) {
  }
  fail(n, path, fmt::format("'{}' is not a non-negative integer", n.Scalar()));
}

PacketConfig get_packet(const YAML::Node& n, std::string_view path) {
  if (!n) throw ConfigError(fmt::format("{}: missing", path));
  expect_map(n, path);
  check_keys(n, path, {"a", "b", "c"});
  PacketConfig p;
  for (auto [key, dst] : {std::pair{"a", &p.a}, std::pair{"b", &p.b}, std::pair{"c", &p.c}}) {
    const auto v = n[key];
    if (!v) fail(n, join(path, key), "missing");
    *dst = get_double(v, join(path, key));
  }
  if (!(p.a > 0.0)) fail(n["a"], join(path, "a"), fmt::format("width must be > 0 (got {})", p.a));
  return p;
}

}  // namespace

ScenarioConfig parse_config(std::string_view text) {
  YAML::Node root;
  try {
    root = YAML::Load(std::string(text));
  } catch (const YAML::ParserException& e) {
    throw ConfigError(fmt::format("line {}: {}", e.mark.line + 1, e.msg));
  }
  if (!root || root.IsNull()) throw ConfigError("empty configuration");
  expect_map(root, "");
  check_keys(root, "", {"packets", "mass", "eta", "detector", "grid", "quadrature", "mc", "range_l", "transverse"});

  ScenarioConfig cfg;
  const auto packets = root["packets"];
  if (!packets) throw ConfigError("packets: missing");
  expect_map(packets, "packets");
  check_keys(packets, "packets", {"left", "right"});
  cfg.left = get_packet(packets["left"], "packets.left");
  cfg.right = get_packet(packets["right"], "packets.right");

  if (const auto n = root["mass"]) {
    cfg.mass = get_double(n, "mass");
    if (!(cfg.mass > 0.0)) fail(n, "mass", "must be > 0");
  }
  if (const auto n = root["eta"]) {
    const auto e = get_int(n, "eta");
    if (e != 1 && e != -1) fail(n, "eta", fmt::format("must be +1 or -1 (got {})", e));
    cfg.eta = static_cast<int>(e);
  }
  if (const auto n = root["detector"]) {
    expect_map(n, "detector");
    check_keys(n, "detector", {"center", "half_width"});
    Detector d;
    if (!n["center"]) fail(n, "detector.center", "missing");
    if (!n["half_width"]) fail(n, "detector.half_width", "missing");
    d.center = get_double(n["center"], "detector.center");
    d.half_width = get_double(n["half_width"], "detector.half_width");
    if (!(d.half_width > 0.0)) fail(n["half_width"], "detector.half_width", "must be > 0");
    cfg.detector = d;
  }
  if (const auto n = root["grid"]) {
    expect_map(n, "grid");
    check_keys(n, "grid", {"t_min", "t_max", "points"});
    if (n["t_min"]) cfg.grid.t_min = get_double(n["t_min"], "grid.t_min");
    if (n["t_max"]) cfg.grid.t_max = get_double(n["t_max"], "grid.t_max");
    if (n["points"]) {
      const auto p = get_int(n["points"], "grid.points");
      if (p < 2 || p > 10'000'000) fail(n["points"], "grid.points", "must be between 2 and 1e7");
      cfg.grid.points = static_cast<int>(p);
    }
    if (cfg.grid.t_min && cfg.grid.t_max && !(*cfg.grid.t_min < *cfg.grid.t_max))
      fail(n, "grid", "t_min must be below t_max");
  }
  if (const auto n = root["quadrature"]) {
    expect_map(n, "quadrature");
    check_keys(n, "quadrature", {"rel_tol", "abs_tol", "max_subdivisions"});
    auto& q = cfg.quadrature;
    if (n["rel_tol"]) q.rel_tol = get_double(n["rel_tol"], "quadrature.rel_tol");
    if (n["abs_tol"]) q.abs_tol = get_double(n["abs_tol"], "quadrature.abs_tol");
    if (n["max_subdivisions"]) {
      const auto m = get_int(n["max_subdivisions"], "quadrature.max_subdivisions");
      if (m < 1 || m > 10'000'000) fail(n["max_subdivisions"], "quadrature.max_subdivisions", "must be between 1 and 1e7");
      q.max_subdivisions = static_cast<int>(m);
    }
    if (!(q.rel_tol > 0.0)) fail(n, "quadrature.rel_tol", "must be > 0");
    if (!(q.abs_tol > 0.0)) fail(n, "quadrature.abs_tol", "must be > 0");
  }
  if (const auto n = root["mc"]) {
    expect_map(n, "mc");
    check_keys(n, "mc", {"samples", "trajectories", "seed", "bins"});
    auto& mc = cfg.mc;
    if (n["samples"]) mc.samples = get_int(n["samples"], "mc.samples");
    if (n["trajectories"]) mc.trajectories = get_int(n["trajectories"], "mc.trajectories");
    if (n["seed"]) mc.seed = get_seed(n["seed"], "mc.seed");
    if (n["bins"]) {
      const auto b = get_int(n["bins"], "mc.bins");
      if (b < 1 || b > 1'000'000) fail(n["bins"], "mc.bins", "must be between 1 and 1e6");
      mc.bins = static_cast<int>(b);
    }
    if (mc.samples < 1) fail(n["samples"], "mc.samples", "must be >= 1");
    if (mc.trajectories < 1) fail(n["trajectories"], "mc.trajectories", "must be >= 1");
  }
  if (const auto n = root["range_l"]) {
    cfg.range_l = get_double(n, "range_l");
    if (!(*cfg.range_l > 0.0)) fail(n, "range_l", "must be > 0");
  }
  if (const auto n = root["transverse"]) {
    expect_map(n, "transverse");
    check_keys(n, "transverse", {"left", "right"});
    TransverseConfig t;
    for (auto [side, y, z] : {std::tuple{"left", &t.left_y, &t.left_z}, std::tuple{"right", &t.right_y, &t.right_z}}) {
      const auto s = n[side];
      const auto path = join("transverse", side);
      if (!s) fail(n, path, "missing");
      expect_map(s, path);
      check_keys(s, path, {"y", "z"});
      *y = get_packet(s["y"], join(path, "y"));
      *z = get_packet(s["z"], join(path, "z"));
    }
    cfg.transverse = t;
  }
  return cfg;
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config file '{}'", path.string()));
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string to_yaml(const ScenarioConfig& c) {
  auto pk = [](const PacketConfig& p) { return fmt::format("{{a: {:.17g}, b: {:.17g}, c: {:.17g}}}", p.a, p.b, p.c); };
  std::string out;
  out += fmt::format("packets:\n  left: {}\n  right: {}\n", pk(c.left), pk(c.right));
  out += fmt::format("mass: {:.17g}\neta: {}\n", c.mass, c.eta);
  if (c.detector) out += fmt::format("detector: {{center: {:.17g}, half_width: {:.17g}}}\n", c.detector->center, c.detector->half_width);
  out += "grid:\n";
  if (c.grid.t_min) out += fmt::format("  t_min: {:.17g}\n", *c.grid.t_min);
  if (c.grid.t_max) out += fmt::format("  t_max: {:.17g}\n", *c.grid.t_max);
  out += fmt::format("  points: {}\n", c.grid.points);
  out += fmt::format("quadrature: {{rel_tol: {:.17g}, abs_tol: {:.17g}, max_subdivisions: {}}}\n", c.quadrature.rel_tol,
                     c.quadrature.abs_tol, c.quadrature.max_subdivisions);
  out += fmt::format("mc: {{samples: {}, trajectories: {}, seed: {}, bins: {}}}\n", c.mc.samples, c.mc.trajectories,
                     c.mc.seed, c.mc.bins);
  if (c.range_l) out += fmt::format("range_l: {:.17g}\n", *c.range_l);
  if (c.transverse) {
    const auto& t = *c.transverse;
    out += fmt::format("transverse:\n  left: {{y: {}, z: {}}}\n  right: {{y: {}, z: {}}}\n", pk(t.left_y), pk(t.left_z),
                       pk(t.right_y), pk(t.right_z));
  }
  return out;
}

Scenario ScenarioConfig::scenario() const {
  return Scenario(GaussianPacket(left.a, left.b, left.c, mass), GaussianPacket(right.a, right.b, right.c, mass), eta,
                  quadrature);
}

TimeWindow ScenarioConfig::window() const {
  const auto w = default_time_window(scenario());
  return {grid.t_min.value_or(w.t_min), grid.t_max.value_or(w.t_max)};
}

std::vector<double> ScenarioConfig::time_grid() const {
  const auto w = window();
  if (!(w.t_min < w.t_max)) throw ConfigError(fmt::format("grid: t_min = {} must be below t_max = {}", w.t_min, w.t_max));
  return linspace(w.t_min, w.t_max, grid.points);
}

namespace {

GaussianPacket packet(const PacketConfig& p, double m) { return GaussianPacket(p.a, p.b, p.c, m); }

const TransverseConfig& need_transverse(const std::optional<TransverseConfig>& t) {
  if (!t) throw ConfigError("transverse: required by the 3D command");
  return *t;
}

}  // namespace

Gaussian3DPacket ScenarioConfig::left3d() const {
  const auto& t = need_transverse(transverse);
  return {{packet(left, mass), packet(t.left_y, mass), packet(t.left_z, mass)}};
}

Gaussian3DPacket ScenarioConfig::right3d() const {
  const auto& t = need_transverse(transverse);
  return {{packet(right, mass), packet(t.right_y, mass), packet(t.right_z, mass)}};
}

std::string ScenarioConfig::fingerprint() const {
  auto pk = [](const PacketConfig& p) { return fmt::format("{:a},{:a},{:a}", p.a, p.b, p.c); };
  std::string text = fmt::format("L={};R={};m={:a};eta={}", pk(left), pk(right), mass, eta);
  text += detector ? fmt::format(";det={:a},{:a}", detector->center, detector->half_width) : ";det=none";
  text += range_l ? fmt::format(";l={:a}", *range_l) : ";l=none";
  if (transverse)
    text += fmt::format(";T={}|{}|{}|{}", pk(transverse->left_y), pk(transverse->left_z), pk(transverse->right_y),
                        pk(transverse->right_z));
  else
    text += ";T=none";
  return fnv1a_hex(text);
}

}  // namespace dynsym
