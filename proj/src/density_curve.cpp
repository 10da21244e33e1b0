#include "dynsym/density_curve.hpp"

#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

namespace dynsym {

std::string_view to_string(DensityMethod m) {
  switch (m) {
    case DensityMethod::semiclassical: return "semiclassical";
    case DensityMethod::quantum: return "quantum";
    case DensityMethod::monte_carlo: return "monte-carlo";
  }
  return "unknown";
}

void DensityCurve::validate() const {
  if (grid.size() != values.size())
    throw std::invalid_argument(fmt::format("density curve: {} grid points but {} values", grid.size(), values.size()));
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1])) throw std::invalid_argument(fmt::format("density curve: grid not increasing at index {}", i));
  for (std::size_t i = 0; i < values.size(); ++i)
    if (!std::isfinite(values[i]) || values[i] < 0.0)
      throw std::invalid_argument(fmt::format("density curve: bad value {} at t = {}", values[i], grid[i]));
}

double DensityCurve::trapezoid() const {
  double s = 0.0;
  for (std::size_t i = 1; i < grid.size(); ++i) s += 0.5 * (values[i] + values[i - 1]) * (grid[i] - grid[i - 1]);
  return s;
}

std::vector<double> linspace(double lo, double hi, int points) {
  if (points < 2 || !(hi > lo)) throw std::invalid_argument(fmt::format("linspace: need points >= 2 and hi > lo, got {} on [{}, {}]", points, lo, hi));
  std::vector<double> g(points);
  for (int i = 0; i < points; ++i) g[i] = lo + (hi - lo) * i / (points - 1);
  g.back() = hi;
  return g;
}

std::vector<double> extend_geometric(std::vector<double> grid, double t_far, int tail_points) {
  if (grid.empty() || !(grid.back() > 0.0) || !(t_far > grid.back()) || tail_points < 1)
    throw std::invalid_argument("extend_geometric: need a positive grid end below t_far");
  const double ratio = std::pow(t_far / grid.back(), 1.0 / tail_points);
  const double start = grid.back();
  for (int i = 1; i <= tail_points; ++i) grid.push_back(start * std::pow(ratio, i));
  grid.back() = t_far;
  return grid;
}

std::string fnv1a_hex(std::string_view text) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : text) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  return fmt::format("{:016x}", h);
}

std::string scenario_fingerprint(const Scenario& sc) {
  auto pk = [](const GaussianPacket& p) { return fmt::format("{:.17g},{:.17g},{:.17g}", p.a(), p.b(), p.c()); };
  return fnv1a_hex(fmt::format("L={};R={};m={:.17g};eta={}", pk(sc.left), pk(sc.right), sc.mass(), sc.eta));
}

}  // namespace dynsym
