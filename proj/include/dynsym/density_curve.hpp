#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "dynsym/wavepacket.hpp"

namespace dynsym {

enum class DensityMethod { semiclassical, quantum, monte_carlo };
std::string_view to_string(DensityMethod m);

struct DensityCurve {
  std::vector<double> grid;
  std::vector<double> values;
  DensityMethod method = DensityMethod::semiclassical;
  std::string meta;        // scenario fingerprint
  double abs_error = 0.0;  // largest pointwise error estimate, 0 for closed forms

  // grid strictly increasing, matching sizes, finite nonnegative values
  void validate() const;
  double trapezoid() const;
};

std::vector<double> linspace(double lo, double hi, int points);

// Appends tail_points geometrically spaced nodes from grid.back() to t_far.
// Used where cumulative probabilities must see the slow t^{-3/2} tail.
std::vector<double> extend_geometric(std::vector<double> grid, double t_far, int tail_points);

// Hex FNV-1a digest of the physical content of a scenario (packets, mass, eta).
std::string scenario_fingerprint(const Scenario& sc);

// Hashes arbitrary canonical text; shared with the config fingerprint.
std::string fnv1a_hex(std::string_view text);

}  // namespace dynsym
