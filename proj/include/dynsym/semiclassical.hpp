#pragma once

#include <cstdint>
#include <optional>
#include <span>

#include "dynsym/density_curve.hpp"
#include "dynsym/execution.hpp"
#include "dynsym/wavepacket.hpp"

namespace dynsym {

struct PhaseSpacePoint {
  double x1, p1, x2, p2;
};

// m (x1 - x2) / (p2 - p1), or nullopt for (numerically) parallel motion.
// Negative values are past collisions.
std::optional<double> classical_collision_time(const PhaseSpacePoint& pt, double m);

// Wigner-averaged density of classical collision times, closed form.
double rho_cl(const Scenario& sc, double t_c);
DensityCurve rho_cl_curve(const Scenario& sc, std::span<const double> grid,
                          Execution exec = Execution::parallel);

struct TimeWindow {
  double t_min, t_max;
};
// Mean +- 8 widths of the collision time from linearised error propagation;
// symmetric about 0 when the packets barely approach each other.
TimeWindow default_time_window(const Scenario& sc);

struct HistogramSpec {
  double lo = 0.0, hi = 1.0;
  int bins = 100;
  void validate() const;
  double width() const { return (hi - lo) / bins; }
  std::vector<double> centers() const;
};

// Normalised by the total sample count, so the bars estimate rho_cl directly
// and sum(values) * width = fraction of samples that landed in range.
DensityCurve rho_cl_mc(const Scenario& sc, std::int64_t n_samples, std::uint64_t seed,
                       const HistogramSpec& bins, Execution exec = Execution::parallel);

}  // namespace dynsym
