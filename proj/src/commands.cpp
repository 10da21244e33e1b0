#include "dynsym/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <limits>
#include <stdexcept>

#include <fmt/format.h>
#include <json.hpp>

#include "dynsym/collision3d.hpp"
#include "dynsym/errors.hpp"
#include "dynsym/jump_sim.hpp"
#include "dynsym/measurement.hpp"
#include "dynsym/quantum_arrival.hpp"
#include "dynsym/semiclassical.hpp"

namespace dynsym {

namespace {

constexpr std::pair<Command, std::string_view> kNames[] = {
    {Command::density, "density"},
    {Command::pc, "pc"},
    {Command::signal, "signal"},
    {Command::trajectories, "trajectories"},
    {Command::density3d, "density3d"},
};

// Trajectory sampling needs p_c out to where it has saturated.
constexpr double kFarTime = 1e8;
constexpr int kFarPoints = 800;

// Emitted densities must be nonnegative and carry at most unit mass.
void check_density_column(const Table& t, std::size_t col, const std::vector<double>& grid) {
  const auto& v = t.columns[col];
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] < 0.0)
      throw DomainError(fmt::format("{}: negative value {} at t = {}", t.header[col], v[i], grid[i]));
  double mass = 0.0;
  for (std::size_t i = 1; i < v.size(); ++i) mass += 0.5 * (v[i] + v[i - 1]) * (grid[i] - grid[i - 1]);
  if (mass > 1.0 + 1e-6) throw DomainError(fmt::format("{}: integrates to {} > 1", t.header[col], mass));
}

// Density grid that also covers t = 0, so p_c(t) can be read off at every
// requested time.
std::vector<double> pcurve_grid(const ScenarioConfig& cfg) {
  const auto w = cfg.window();
  if (!(w.t_max > 0.0)) throw ConfigError(fmt::format("grid: t_max = {} must be > 0 for p_c", w.t_max));
  return linspace(std::min(0.0, w.t_min), w.t_max, cfg.grid.points);
}

double pc_at(const DensityCurve& curve, double t) { return t <= 0.0 ? 0.0 : collision_probability(curve, t); }

void quadrature_tolerances(Summary& s, const ScenarioConfig& cfg) {
  s.tolerances.emplace_back("quadrature_rel_tol", cfg.quadrature.rel_tol);
  s.tolerances.emplace_back("quadrature_abs_tol", cfg.quadrature.abs_tol);
}

CommandOutput run_density(const ScenarioConfig& cfg) {
  const auto sc = cfg.scenario();
  const auto grid = cfg.time_grid();
  const auto cl = rho_cl_curve(sc, grid);
  const auto q = rho_quantum(sc, grid);

  CommandOutput out;
  out.table = {{"t_c", "rho_cl", "rho_quantum"}, {grid, cl.values, q.curve.values}};
  check_density_column(out.table, 1, grid);
  check_density_column(out.table, 2, grid);

  double sup = 0.0, peak = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    sup = std::max(sup, std::abs(q.curve.values[i] - cl.values[i]));
    peak = std::max(peak, q.curve.values[i]);
  }
  auto& s = out.summary;
  s.scalars = {{"p_c_total", q.p_c_total},
               {"rho_cl_mass_on_grid", cl.trapezoid()},
               {"rho_quantum_mass_on_grid", q.curve.trapezoid()},
               {"sup_deviation_over_peak", peak > 0.0 ? sup / peak : 0.0},
               {"A0", q.A0},
               {"A1", q.A1},
               {"A2", q.A2}};
  quadrature_tolerances(s, cfg);
  s.tolerances.emplace_back("rho_quantum_abs_error", q.curve.abs_error);
  s.tolerances.emplace_back("p_c_total_error", q.p_c_total_error);
  return out;
}

CommandOutput run_pc(const ScenarioConfig& cfg) {
  const auto sc = cfg.scenario();
  const auto grid = cfg.time_grid();
  const auto q = rho_quantum(sc, pcurve_grid(cfg));

  std::vector<double> pc(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) pc[i] = pc_at(q.curve, grid[i]);

  CommandOutput out;
  out.table = {{"t", "p_c"}, {grid, pc}};
  auto& s = out.summary;
  s.scalars = {{"p_c_total", q.p_c_total}, {"p_c_at_t_max", pc.back()}};
  quadrature_tolerances(s, cfg);
  s.tolerances.emplace_back("rho_quantum_abs_error", q.curve.abs_error);
  s.tolerances.emplace_back("p_c_total_error", q.p_c_total_error);
  return out;
}

CommandOutput run_signal(const ScenarioConfig& cfg) {
  if (!cfg.detector) throw ConfigError("detector: required by the signal command");
  const auto sc = cfg.scenario();
  const auto grid = cfg.time_grid();
  const auto q = rho_quantum(sc, pcurve_grid(cfg));
  const auto sig = signal_curve(sc, *cfg.detector, q.curve, grid);

  CommandOutput out;
  out.table = {{"t", "direct_term", "correlation_term"}, {grid, sig.direct, sig.correlation}};
  const auto id = std::max_element(sig.direct.begin(), sig.direct.end()) - sig.direct.begin();
  const auto ic = std::max_element(sig.correlation.begin(), sig.correlation.end()) - sig.correlation.begin();
  auto& s = out.summary;
  s.scalars = {{"direct_peak_t", grid[id]},
               {"direct_peak", sig.direct[id]},
               {"correlation_peak_t", grid[ic]},
               {"correlation_peak", sig.correlation[ic]},
               {"direct_at_correlation_peak", sig.direct[ic]},
               {"p_c_total", q.p_c_total}};
  quadrature_tolerances(s, cfg);
  s.tolerances.emplace_back("rho_quantum_abs_error", q.curve.abs_error);
  return out;
}

CommandOutput run_trajectories(const ScenarioConfig& cfg) {
  const auto sc = cfg.scenario();
  const auto grid = cfg.time_grid();
  const auto q = rho_quantum(sc, extend_geometric(pcurve_grid(cfg), kFarTime, kFarPoints));
  const auto M = cfg.mc.trajectories;
  const auto traj = simulate_ensemble(q.curve, M, cfg.mc.seed);
  const auto ens = summarize(traj, grid, cfg.mc.seed);

  std::vector<double> pc(grid.size()), band(grid.size());
  double worst = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    pc[i] = pc_at(q.curve, grid[i]);
    const double sigma = std::sqrt(pc[i] * (1.0 - pc[i]) / static_cast<double>(M));
    if (sigma > 0.0) worst = std::max(worst, std::abs(ens.jumped_fraction[i] - pc[i]) / sigma);
  }

  CommandOutput out;
  out.table = {{"t", "jumped_fraction", "p_c"}, {grid, ens.jumped_fraction, pc}};

  Table jumps{{"index", "gamma", "jump_time"}, {{}, {}, {}}};
  for (const auto& tr : traj) {
    jumps.columns[0].push_back(static_cast<double>(tr.index));
    jumps.columns[1].push_back(tr.gamma);
    jumps.columns[2].push_back(tr.jump_time.value_or(std::numeric_limits<double>::infinity()));
  }
  out.jumps = std::move(jumps);

  const double p_far = cumulative_probability(q.curve).p.back();
  auto& s = out.summary;
  s.scalars = {{"trajectories", static_cast<double>(M)},
               {"never_jumped_fraction", static_cast<double>(ens.never_jumped) / static_cast<double>(M)},
               {"one_minus_p_c_far", 1.0 - p_far},
               {"max_deviation_in_sigmas", worst},
               {"p_c_total", q.p_c_total}};
  quadrature_tolerances(s, cfg);
  s.tolerances.emplace_back("rho_quantum_abs_error", q.curve.abs_error);
  return out;
}

CommandOutput run_density3d(const ScenarioConfig& cfg) {
  if (!cfg.range_l) throw ConfigError("range_l: required by the density3d command");
  const double l = *cfg.range_l;
  const auto left = cfg.left3d();
  const auto right = cfg.right3d();

  // Default range: the 1D window of packets whose separation is reduced by l.
  const auto sc = cfg.scenario();
  const double m = sc.mass();
  const Scenario reduced(GaussianPacket(sc.left.a(), sc.left.b(), sc.left.c() + l / 2, m),
                         GaussianPacket(sc.right.a(), sc.right.b(), sc.right.c() - l / 2, m), sc.eta);
  const auto w = default_time_window(reduced);
  const HistogramSpec bins{cfg.grid.t_min.value_or(std::max(0.0, w.t_min)), cfg.grid.t_max.value_or(w.t_max),
                           cfg.mc.bins};
  if (!(bins.lo < bins.hi))
    throw ConfigError(fmt::format("grid: t_min = {} must be below t_max = {}", bins.lo, bins.hi));
  const auto res = rho3d_mc(left, right, l, cfg.mc.samples, cfg.mc.seed, bins);

  CommandOutput out;
  out.table = {{"t_c", "rho_mc"}, {res.curve.grid, res.curve.values}};
  check_density_column(out.table, 1, res.curve.grid);
  auto& s = out.summary;
  s.scalars = {{"collision_fraction", res.collision_fraction},
               {"accepted", static_cast<double>(res.accepted)},
               {"samples", static_cast<double>(res.total)},
               {"inside_range", static_cast<double>(res.inside_range)},
               {"histogram_mass", res.curve.trapezoid()}};
  s.tolerances = {{"contact_residual_max", res.max_residual}};
  return out;
}

void write_file(const std::filesystem::path& path, const std::string& text) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError(fmt::format("cannot open '{}' for writing", path.string()));
  f << text;
  if (!f) throw ConfigError(fmt::format("write to '{}' failed", path.string()));
}

}  // namespace

std::optional<Command> parse_command(std::string_view name) {
  for (auto [c, n] : kNames)
    if (n == name) return c;
  return std::nullopt;
}

std::string_view to_string(Command c) {
  for (auto [k, n] : kNames)
    if (k == c) return n;
  return "unknown";
}

void Table::validate() const {
  if (columns.size() != header.size())
    throw std::logic_error(fmt::format("table: {} columns for {} header fields", columns.size(), header.size()));
  for (std::size_t c = 0; c < columns.size(); ++c) {
    if (columns[c].size() != rows()) throw std::logic_error(fmt::format("table: column '{}' is ragged", header[c]));
    for (std::size_t r = 0; r < columns[c].size(); ++r)
      if (std::isnan(columns[c][r])) throw DomainError(fmt::format("table: NaN in column '{}', row {}", header[c], r));
  }
}

std::string Table::to_csv() const {
  validate();
  std::string out = fmt::format("{}\n", fmt::join(header, ","));
  for (std::size_t r = 0; r < rows(); ++r) {
    for (std::size_t c = 0; c < columns.size(); ++c) {
      if (c) out += ',';
      out += fmt::format("{:.12g}", columns[c][r]);
    }
    out += '\n';
  }
  return out;
}

std::string Summary::to_json() const {
  nlohmann::ordered_json j;
  j["command"] = command;
  j["fingerprint"] = fingerprint;
  j["seed"] = seed;
  auto& sc = j["scalars"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : scalars) sc[k] = v;
  auto& tol = j["tolerances"] = nlohmann::ordered_json::object();
  for (const auto& [k, v] : tolerances) tol[k] = v;
  j["wall_time_s"] = wall_time_s;
  return j.dump(2) + "\n";
}

CommandOutput run_command(Command cmd, const ScenarioConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  CommandOutput out;
  switch (cmd) {
    case Command::density: out = run_density(cfg); break;
    case Command::pc: out = run_pc(cfg); break;
    case Command::signal: out = run_signal(cfg); break;
    case Command::trajectories: out = run_trajectories(cfg); break;
    case Command::density3d: out = run_density3d(cfg); break;
  }
  out.table.validate();
  if (out.jumps) out.jumps->validate();
  out.summary.command = std::string(to_string(cmd));
  out.summary.fingerprint = cfg.fingerprint();
  out.summary.seed = cfg.mc.seed;
  out.summary.wall_time_s = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return out;
}

std::vector<std::filesystem::path> write_outputs(const CommandOutput& result, const std::filesystem::path& out) {
  auto stem = out;
  stem.replace_extension();
  std::vector<std::filesystem::path> written{out, stem.string() + ".summary.json"};
  write_file(written[0], result.table.to_csv());
  write_file(written[1], result.summary.to_json());
  if (result.jumps) {
    written.push_back(stem.string() + ".jumps.csv");
    write_file(written.back(), result.jumps->to_csv());
  }
  return written;
}

}  // namespace dynsym
