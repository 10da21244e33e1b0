#include "dynsym/collision3d.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <stdexcept>
#include <vector>

#include <fmt/format.h>

#include "dynsym/rng.hpp"

namespace dynsym {

namespace {

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

Vec3 cross(const Vec3& a, const Vec3& b) {
  return {a[1] * b[2] - a[2] * b[1], a[2] * b[0] - a[0] * b[2], a[0] * b[1] - a[1] * b[0]};
}

bool finite(const Vec3& v) { return std::isfinite(v[0]) && std::isfinite(v[1]) && std::isfinite(v[2]); }

// Relative coordinates and the pieces of the quadratic |x + p t/m|^2 = l^2.
struct Relative {
  double xp, x2_minus_l2, p2, disc;
};

Relative relative(const Vec3& x, const Vec3& p, double l) {
  const Vec3 c = cross(x, p);
  const double p2 = dot(p, p);
  return {dot(x, p), dot(x, x) - l * l, p2, p2 * l * l - dot(c, c)};
}

std::optional<double> contact_time(const Vec3& x, const Vec3& p, double m, double l) {
  const auto r = relative(x, p, l);
  if (!(r.xp < 0.0) || !(r.x2_minus_l2 > 0.0) || !(r.p2 > 0.0) || r.disc < 0.0) return std::nullopt;
  // smaller root of p^2 t^2/m^2 + 2 x.p t/m + x^2 - l^2, in the form without cancellation
  return m * r.x2_minus_l2 / (-r.xp + std::sqrt(r.disc));
}

}  // namespace

Vec3 PhasePoint3D::x12() const { return {x1[0] - x2[0], x1[1] - x2[1], x1[2] - x2[2]}; }
Vec3 PhasePoint3D::p12() const { return {p1[0] - p2[0], p1[1] - p2[1], p1[2] - p2[2]}; }

void PhasePoint3D::validate() const {
  if (!finite(x1) || !finite(x2) || !finite(p1) || !finite(p2) || !std::isfinite(m) || !std::isfinite(l))
    throw std::invalid_argument("3D phase-space point has non-finite entries");
  if (!(m > 0.0)) throw std::invalid_argument("3D phase-space point: mass must be > 0");
  if (!(l >= 0.0)) throw std::invalid_argument("3D phase-space point: interaction range must be >= 0");
  const auto x = x12();
  if (!(std::sqrt(dot(x, x)) > l))
    throw std::invalid_argument(fmt::format("particles start within the interaction range l = {}", l));
}

bool collision_condition_3d(const PhasePoint3D& pt) {
  pt.validate();
  const auto r = relative(pt.x12(), pt.p12(), pt.l);
  return r.xp < 0.0 && r.p2 > 0.0 && r.x2_minus_l2 > 0.0 && r.disc > 0.0;
}

std::optional<double> collision_time_3d(const PhasePoint3D& pt) {
  pt.validate();
  return contact_time(pt.x12(), pt.p12(), pt.m, pt.l);
}

double contact_residual(const PhasePoint3D& pt, double t) {
  const auto x = pt.x12();
  const auto p = pt.p12();
  const Vec3 at{x[0] + p[0] * t / pt.m, x[1] + p[1] * t / pt.m, x[2] + p[2] * t / pt.m};
  return std::abs(std::sqrt(dot(at, at)) - pt.l) / pt.l;
}

void Gaussian3DPacket::validate() const {
  for (const auto& ax : axes)
    if (ax.m() != axes[0].m()) throw std::invalid_argument("3D packet axes must share one mass");
}

namespace {

constexpr std::int64_t kChunk = 1 << 16;

struct Tally {
  std::vector<std::int64_t> hist;
  std::int64_t accepted = 0, inside = 0;
  double max_residual = 0.0;
};

void mc3d_chunk(const Gaussian3DPacket& left, const Gaussian3DPacket& right, double l, std::uint64_t seed,
                std::int64_t chunk, std::int64_t count, const HistogramSpec& bins, Tally& tally) {
  auto gen = substream(seed, static_cast<std::uint64_t>(chunk));
  std::normal_distribution<double> n01;
  const double m = left.m();
  auto draw = [&](const GaussianPacket& g, double& x, double& p) {
    x = g.c() + g.a() / std::numbers::sqrt2 * n01(gen);
    p = g.mean_momentum() + n01(gen) / (std::numbers::sqrt2 * g.a());
  };
  for (std::int64_t i = 0; i < count; ++i) {
    PhasePoint3D pt;
    pt.m = m;
    pt.l = l;
    for (int k = 0; k < 3; ++k) draw(left.axes[k], pt.x1[k], pt.p1[k]);
    for (int k = 0; k < 3; ++k) draw(right.axes[k], pt.x2[k], pt.p2[k]);
    const auto x = pt.x12();
    if (!(dot(x, x) > l * l)) {
      ++tally.inside;
      continue;
    }
    if (!collision_condition_3d(pt)) continue;
    const auto t = contact_time(x, pt.p12(), m, l);
    if (!t) continue;
    ++tally.accepted;
    tally.max_residual = std::max(tally.max_residual, contact_residual(pt, *t));
    if (*t < bins.lo || *t >= bins.hi) continue;
    const auto k = std::min<std::int64_t>(bins.bins - 1, static_cast<std::int64_t>((*t - bins.lo) / bins.width()));
    ++tally.hist[k];
  }
}

std::string fingerprint3d(const Gaussian3DPacket& left, const Gaussian3DPacket& right, double l) {
  std::string text;
  for (const auto* p : {&left, &right})
    for (const auto& ax : p->axes) text += fmt::format("{:a},{:a},{:a},{:a};", ax.a(), ax.b(), ax.c(), ax.m());
  text += fmt::format("l={:a}", l);
  return fnv1a_hex(text);
}

}  // namespace

Collision3DResult rho3d_mc(const Gaussian3DPacket& left, const Gaussian3DPacket& right, double l,
                           std::int64_t n_samples, std::uint64_t seed, const HistogramSpec& bins, Execution exec) {
  if (n_samples < 1) throw std::invalid_argument("rho3d_mc: n_samples must be >= 1");
  if (!(l > 0.0) || !std::isfinite(l)) throw std::invalid_argument("rho3d_mc: interaction range l must be > 0");
  left.validate();
  right.validate();
  if (left.m() != right.m()) throw std::invalid_argument("identical particles need equal masses");
  bins.validate();

  const std::int64_t chunks = (n_samples + kChunk - 1) / kChunk;
  auto chunk_size = [&](std::int64_t c) { return std::min(kChunk, n_samples - c * kChunk); };
  Tally total;
  total.hist.assign(bins.bins, 0);
  if (exec == Execution::parallel) {
#pragma omp parallel
    {
      Tally local;
      local.hist.assign(bins.bins, 0);
#pragma omp for schedule(dynamic, 1)
      for (std::int64_t c = 0; c < chunks; ++c) mc3d_chunk(left, right, l, seed, c, chunk_size(c), bins, local);
#pragma omp critical(dynsym_mc3d_merge)
      {
        for (int k = 0; k < bins.bins; ++k) total.hist[k] += local.hist[k];
        total.accepted += local.accepted;
        total.inside += local.inside;
        total.max_residual = std::max(total.max_residual, local.max_residual);
      }
    }
  } else {
    for (std::int64_t c = 0; c < chunks; ++c) mc3d_chunk(left, right, l, seed, c, chunk_size(c), bins, total);
  }

  Collision3DResult out;
  out.curve.grid = bins.centers();
  out.curve.values.resize(bins.bins);
  const double norm = static_cast<double>(n_samples) * bins.width();
  for (int k = 0; k < bins.bins; ++k) out.curve.values[k] = static_cast<double>(total.hist[k]) / norm;
  out.curve.method = DensityMethod::monte_carlo;
  out.curve.meta = fingerprint3d(left, right, l);
  out.total = n_samples;
  out.accepted = total.accepted;
  out.inside_range = total.inside;
  out.collision_fraction = static_cast<double>(total.accepted) / static_cast<double>(n_samples);
  out.max_residual = total.max_residual;
  return out;
}

}  // namespace dynsym
