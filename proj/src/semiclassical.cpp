#include "dynsym/semiclassical.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

#include "dynsym/rng.hpp"

namespace dynsym {

std::optional<double> classical_collision_time(const PhaseSpacePoint& pt, double m) {
  if (!std::isfinite(pt.x1) || !std::isfinite(pt.x2) || !std::isfinite(pt.p1) || !std::isfinite(pt.p2))
    throw std::invalid_argument("classical_collision_time: non-finite phase-space point");
  if (!(m > 0.0)) throw std::invalid_argument("classical_collision_time: mass must be > 0");
  const double dp = pt.p2 - pt.p1;
  if (std::abs(dp) <= 1e-14 * std::max(std::abs(pt.p1), std::abs(pt.p2))) return std::nullopt;
  return m * (pt.x1 - pt.x2) / dp;
}

double rho_cl(const Scenario& sc, double t_c) {
  // Relative momentum u enters as |u| times two Gaussians in u; completing
  // the square gives K exp(-R) int |u| exp(-P (u - mu)^2) du.
  const double aL = sc.left.a(), aR = sc.right.a(), m = sc.mass();
  const double s = aL * aL + aR * aR;
  const double k = aL * aR / (std::numbers::pi * m * s);
  const double A = aL * aL * aR * aR / s;
  const double B = 1.0 / s;
  const double u0 = sc.left.b() / aL - sc.right.b() / aR;
  const double d = sc.separation();
  const double lam = t_c / m;
  const double P = A + B * lam * lam;
  const double mu = (A * u0 + B * d * lam) / P;
  const double dl = lam * u0 - d;
  const double R = A * B * dl * dl / P;
  const double abs_moment = mu * std::sqrt(std::numbers::pi / P) * std::erf(mu * std::sqrt(P)) + std::exp(-P * mu * mu) / P;
  return k * std::exp(-R) * abs_moment;
}

DensityCurve rho_cl_curve(const Scenario& sc, std::span<const double> grid, Execution exec) {
  DensityCurve out;
  out.grid.assign(grid.begin(), grid.end());
  out.values.resize(grid.size());
  out.method = DensityMethod::semiclassical;
  out.meta = scenario_fingerprint(sc);
  const auto n = static_cast<std::ptrdiff_t>(grid.size());
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(static)
    for (std::ptrdiff_t i = 0; i < n; ++i) out.values[i] = rho_cl(sc, grid[i]);
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) out.values[i] = rho_cl(sc, grid[i]);
  }
  out.validate();
  return out;
}

TimeWindow default_time_window(const Scenario& sc) {
  const double aL = sc.left.a(), aR = sc.right.a(), m = sc.mass();
  const double s = aL * aL + aR * aR;
  const double sigma_u = std::sqrt(s) / (std::numbers::sqrt2 * aL * aR);
  const double sigma_d = std::sqrt(s) / std::numbers::sqrt2;
  const double u0 = sc.left.b() / aL - sc.right.b() / aR;
  const double d = sc.separation();
  if (std::abs(u0) < sigma_u) {
    const double half = 8.0 * m * (std::abs(d) + sigma_d) / sigma_u;
    return {-half, half};
  }
  const double t0 = m * d / u0;
  const double sigma_t = m * std::sqrt(d * d * sigma_u * sigma_u / std::pow(u0, 4) + sigma_d * sigma_d / (u0 * u0));
  return {t0 - 8.0 * sigma_t, t0 + 8.0 * sigma_t};
}

void HistogramSpec::validate() const {
  if (bins < 1) throw std::invalid_argument(fmt::format("histogram: bins = {} must be >= 1", bins));
  if (!std::isfinite(lo) || !std::isfinite(hi) || !(hi > lo) || !(width() > 0.0))
    throw std::invalid_argument(fmt::format("histogram: degenerate bins on [{}, {}]", lo, hi));
}

std::vector<double> HistogramSpec::centers() const {
  std::vector<double> c(bins);
  for (int i = 0; i < bins; ++i) c[i] = lo + (i + 0.5) * width();
  return c;
}

namespace {

constexpr std::int64_t kChunk = 1 << 16;

void mc_chunk(const Scenario& sc, std::uint64_t seed, std::int64_t chunk, std::int64_t count,
              const HistogramSpec& bins, std::vector<std::int64_t>& hist) {
  auto gen = substream(seed, static_cast<std::uint64_t>(chunk));
  std::normal_distribution<double> n01;
  const auto& l = sc.left;
  const auto& r = sc.right;
  const double sxl = l.a() / std::numbers::sqrt2, spl = 1.0 / (std::numbers::sqrt2 * l.a());
  const double sxr = r.a() / std::numbers::sqrt2, spr = 1.0 / (std::numbers::sqrt2 * r.a());
  for (std::int64_t i = 0; i < count; ++i) {
    PhaseSpacePoint pt;
    pt.x1 = l.c() + sxl * n01(gen);
    pt.p1 = l.mean_momentum() + spl * n01(gen);
    pt.x2 = r.c() + sxr * n01(gen);
    pt.p2 = r.mean_momentum() + spr * n01(gen);
    const auto t = classical_collision_time(pt, sc.mass());
    if (!t || *t < bins.lo || *t >= bins.hi) continue;
    const auto k = std::min<std::int64_t>(bins.bins - 1, static_cast<std::int64_t>((*t - bins.lo) / bins.width()));
    ++hist[k];
  }
}

}  // namespace

DensityCurve rho_cl_mc(const Scenario& sc, std::int64_t n_samples, std::uint64_t seed,
                       const HistogramSpec& bins, Execution exec) {
  if (n_samples < 1) throw std::invalid_argument("rho_cl_mc: n_samples must be >= 1");
  bins.validate();
  const std::int64_t chunks = (n_samples + kChunk - 1) / kChunk;
  std::vector<std::int64_t> hist(bins.bins, 0);
  auto chunk_size = [&](std::int64_t c) { return std::min(kChunk, n_samples - c * kChunk); };
  if (exec == Execution::parallel) {
#pragma omp parallel
    {
      std::vector<std::int64_t> local(bins.bins, 0);
#pragma omp for schedule(dynamic, 1)
      for (std::int64_t c = 0; c < chunks; ++c) mc_chunk(sc, seed, c, chunk_size(c), bins, local);
#pragma omp critical
      for (int k = 0; k < bins.bins; ++k) hist[k] += local[k];
    }
  } else {
    for (std::int64_t c = 0; c < chunks; ++c) mc_chunk(sc, seed, c, chunk_size(c), bins, hist);
  }

  DensityCurve out;
  out.grid = bins.centers();
  out.values.resize(bins.bins);
  for (int k = 0; k < bins.bins; ++k) out.values[k] = static_cast<double>(hist[k]) / (static_cast<double>(n_samples) * bins.width());
  out.method = DensityMethod::monte_carlo;
  out.meta = scenario_fingerprint(sc);
  return out;
}

}  // namespace dynsym
