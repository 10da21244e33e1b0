#include "dynsym/jump_sim.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include <fmt/format.h>

#include "dynsym/rng.hpp"

namespace dynsym {

namespace {

void check_curve_matches(const Scenario& sc, const DensityCurve& pcurve) {
  if (!pcurve.meta.empty() && pcurve.meta != scenario_fingerprint(sc))
    throw std::invalid_argument("collision density was computed for a different scenario");
}

}  // namespace

TwoParticleState Trajectory::state_at(const Scenario& sc, double t) const {
  return jumped_by(t) ? TwoParticleState::symmetrized(sc) : TwoParticleState::product(sc);
}

TwoPacketKet Trajectory::ket_at(const Scenario& sc, double t) const {
  return jumped_by(t) ? apply_symmetrizer(product_ket(), sc.eta) : product_ket();
}

std::optional<double> sample_jump_time(const CumulativeCurve& cum, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw std::invalid_argument(fmt::format("sample_jump_time: gamma = {} outside [0, 1]", gamma));
  if (cum.t.size() < 2 || cum.t.size() != cum.p.size())
    throw std::invalid_argument("sample_jump_time: cumulative curve needs at least two nodes");
  if (gamma >= cum.p.back()) return std::nullopt;
  // First node strictly above gamma; for gamma = 0 this lands just past the
  // last node where p_c is still zero.
  const auto it = std::upper_bound(cum.p.begin(), cum.p.end(), gamma);
  const auto j = static_cast<std::size_t>(it - cum.p.begin());
  if (j == 0) return cum.t.front();
  const double f = (gamma - cum.p[j - 1]) / (cum.p[j] - cum.p[j - 1]);
  return cum.t[j - 1] + f * (cum.t[j] - cum.t[j - 1]);
}

std::optional<double> sample_jump_time(const DensityCurve& pcurve, double gamma) {
  return sample_jump_time(cumulative_probability(pcurve), gamma);
}

double trajectory_uniform(std::uint64_t seed, std::uint64_t index) {
  auto gen = substream(seed, index);
  return static_cast<double>(gen() >> 11) * 0x1p-53;
}

Trajectory simulate_trajectory(const Scenario& sc, const DensityCurve& pcurve, std::uint64_t seed,
                               std::uint64_t index) {
  check_curve_matches(sc, pcurve);
  Trajectory tr;
  tr.seed = seed;
  tr.index = index;
  tr.gamma = trajectory_uniform(seed, index);
  tr.jump_time = sample_jump_time(pcurve, tr.gamma);
  return tr;
}

std::vector<Trajectory> simulate_ensemble(const DensityCurve& pcurve, std::int64_t M, std::uint64_t seed,
                                          Execution exec) {
  if (M < 1) throw std::invalid_argument(fmt::format("ensemble size M = {} must be >= 1", M));
  const auto cum = cumulative_probability(pcurve);
  std::vector<Trajectory> out(static_cast<std::size_t>(M));
  auto body = [&](std::int64_t i) {
    auto& tr = out[static_cast<std::size_t>(i)];
    tr.seed = seed;
    tr.index = static_cast<std::uint64_t>(i);
    tr.gamma = trajectory_uniform(seed, tr.index);
    tr.jump_time = sample_jump_time(cum, tr.gamma);
  };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (std::int64_t i = 0; i < M; ++i) body(i);
  } else {
    for (std::int64_t i = 0; i < M; ++i) body(i);
  }
  return out;
}

EnsembleSummary summarize(std::span<const Trajectory> trajectories, std::span<const double> t_grid,
                          std::uint64_t seed) {
  if (trajectories.empty()) throw std::invalid_argument("summarize: no trajectories");
  std::vector<double> times;
  times.reserve(trajectories.size());
  for (const auto& tr : trajectories)
    if (tr.jump_time) times.push_back(*tr.jump_time);
  std::sort(times.begin(), times.end());

  EnsembleSummary out;
  out.t_grid.assign(t_grid.begin(), t_grid.end());
  out.n_trajectories = static_cast<std::int64_t>(trajectories.size());
  out.never_jumped = out.n_trajectories - static_cast<std::int64_t>(times.size());
  out.seed = seed;
  out.jumped_fraction.reserve(t_grid.size());
  const double inv = 1.0 / static_cast<double>(trajectories.size());
  for (double t : t_grid) {
    const auto n = std::upper_bound(times.begin(), times.end(), t) - times.begin();
    out.jumped_fraction.push_back(static_cast<double>(n) * inv);
  }
  return out;
}

EnsembleSummary ensemble_summary(const Scenario& sc, const DensityCurve& pcurve, std::int64_t M,
                                 std::uint64_t seed, std::span<const double> t_grid, Execution exec) {
  check_curve_matches(sc, pcurve);
  const auto trajectories = simulate_ensemble(pcurve, M, seed, exec);
  return summarize(trajectories, t_grid, seed);
}

PairProbabilities ensemble_pair_detection(std::span<const Trajectory> trajectories, const Scenario& sc,
                                          const Detector& det, double t) {
  if (trajectories.empty()) throw std::invalid_argument("ensemble_pair_detection: no trajectories");
  // Only two distinct pure states occur, so evaluate each once.
  const auto el = detector_matrix_elements(sc, det, t);
  const auto before = pair_detection_probability(product_ket(), sc, el);
  const auto after = pair_detection_probability(apply_symmetrizer(product_ket(), sc.eta), sc, el);
  std::int64_t jumped = 0;
  for (const auto& tr : trajectories) jumped += tr.jumped_by(t) ? 1 : 0;
  const double f = static_cast<double>(jumped) / static_cast<double>(trajectories.size());
  return {(1.0 - f) * before.both + f * after.both, (1.0 - f) * before.none + f * after.none,
          (1.0 - f) * before.one + f * after.one};
}

}  // namespace dynsym
