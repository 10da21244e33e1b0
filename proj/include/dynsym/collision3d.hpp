#pragma once

#include <array>
#include <cstdint>
#include <optional>

#include "dynsym/density_curve.hpp"
#include "dynsym/execution.hpp"
#include "dynsym/semiclassical.hpp"
#include "dynsym/wavepacket.hpp"

namespace dynsym {

using Vec3 = std::array<double, 3>;

// Two free classical particles that collide when their distance first
// reaches the interaction range l.
struct PhasePoint3D {
  Vec3 x1{}, x2{}, p1{}, p2{};
  double m = 1.0;
  double l = 0.0;

  Vec3 x12() const;
  Vec3 p12() const;
  // finite entries, m > 0, l >= 0, |x12| > l
  void validate() const;
};

// -x12.p12 > |p12| sqrt(x12^2 - l^2) > 0, evaluated through
// (x12.p12)^2 - p12^2 (x12^2 - l^2) = p12^2 l^2 - |x12 x p12|^2 so that l = 0
// is rejected exactly.
bool collision_condition_3d(const PhasePoint3D& pt);

// First positive time with |x12 + p12 t / m| = l. A trajectory that only
// grazes the sphere (zero discriminant) still touches it and gets its
// tangent time. Throws std::invalid_argument on NaN input.
std::optional<double> collision_time_3d(const PhasePoint3D& pt);

// | |x12 + p12 t/m| - l | / l
double contact_residual(const PhasePoint3D& pt, double t);

// Product of one-dimensional Gaussian packets along x, y and z.
struct Gaussian3DPacket {
  std::array<GaussianPacket, 3> axes;
  double m() const { return axes[0].m(); }
  void validate() const;
};

struct Collision3DResult {
  DensityCurve curve;  // histogram normalised by the total sample count
  double collision_fraction = 0.0;
  std::int64_t accepted = 0;
  std::int64_t total = 0;
  std::int64_t inside_range = 0;  // samples starting closer than l; never accepted
  double max_residual = 0.0;      // over all accepted samples
};

// Samples the two Wigner functions at t = 0, keeps pairs that satisfy the
// collision condition, and histograms their collision times.
Collision3DResult rho3d_mc(const Gaussian3DPacket& left, const Gaussian3DPacket& right, double l,
                           std::int64_t n_samples, std::uint64_t seed, const HistogramSpec& bins,
                           Execution exec = Execution::parallel);

}  // namespace dynsym
