#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "dynsym/density_curve.hpp"
#include "dynsym/execution.hpp"
#include "dynsym/measurement.hpp"
#include "dynsym/quantum_arrival.hpp"

namespace dynsym {

// One realisation: product state until jump_time, symmetrised afterwards.
// No jump_time means the pair never collides.
struct Trajectory {
  std::optional<double> jump_time;
  double gamma = 0.0;
  std::uint64_t seed = 0;
  std::uint64_t index = 0;

  bool jumped_by(double t) const { return jump_time && *jump_time <= t; }
  TwoParticleState state_at(const Scenario& sc, double t) const;
  // The ket itself: |LR> before the jump, the symmetriser applied to it after.
  TwoPacketKet ket_at(const Scenario& sc, double t) const;
  bool operator==(const Trajectory&) const = default;
};

struct EnsembleSummary {
  std::vector<double> t_grid;
  std::vector<double> jumped_fraction;
  std::int64_t n_trajectories = 0;
  std::int64_t never_jumped = 0;
  std::uint64_t seed = 0;
};

// Smallest t with p_c(t) = gamma on the piecewise-linear cumulative curve;
// nullopt when gamma >= p_c(t_max). Throws std::invalid_argument unless
// gamma is in [0, 1].
std::optional<double> sample_jump_time(const CumulativeCurve& cum, double gamma);
std::optional<double> sample_jump_time(const DensityCurve& pcurve, double gamma);

// gamma in [0, 1) from 53 random bits of substream(seed, index)
double trajectory_uniform(std::uint64_t seed, std::uint64_t index);

Trajectory simulate_trajectory(const Scenario& sc, const DensityCurve& pcurve, std::uint64_t seed,
                               std::uint64_t index = 0);

// Trajectory i uses substream(seed, i), whatever the execution mode.
std::vector<Trajectory> simulate_ensemble(const DensityCurve& pcurve, std::int64_t M, std::uint64_t seed,
                                          Execution exec = Execution::parallel);

EnsembleSummary summarize(std::span<const Trajectory> trajectories, std::span<const double> t_grid,
                          std::uint64_t seed);
EnsembleSummary ensemble_summary(const Scenario& sc, const DensityCurve& pcurve, std::int64_t M,
                                 std::uint64_t seed, std::span<const double> t_grid,
                                 Execution exec = Execution::parallel);

// Average over trajectories of the pure-state pair probabilities at time t.
PairProbabilities ensemble_pair_detection(std::span<const Trajectory> trajectories, const Scenario& sc,
                                          const Detector& det, double t);

}  // namespace dynsym
