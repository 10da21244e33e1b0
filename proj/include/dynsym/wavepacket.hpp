#pragma once

#include "dynsym/quadrature.hpp"
#include "dynsym/specfun.hpp"

namespace dynsym {

// Free Gaussian packet with momentum amplitude
//   chi(p) = sqrt(a) pi^{-1/4} exp(-b^2/2 + p (b a - i c) - a^2 p^2 / 2),
// so <p> = b/a, Var(p) = 1/(2 a^2), and the packet starts centred at x = c.
// hbar = 1.
class GaussianPacket {
 public:
  GaussianPacket(double a, double b, double c, double m = 1.0);

  double a() const { return a_; }
  double b() const { return b_; }
  double c() const { return c_; }
  double m() const { return m_; }

  double mean_momentum() const { return b_ / a_; }
  double momentum_variance() const { return 0.5 / (a_ * a_); }
  double tau(double t) const { return t / (m_ * a_ * a_); }
  double center(double t) const { return c_ + mean_momentum() * t / m_; }
  // standard deviation of |psi(x, t)|^2
  double position_width(double t) const;

  // Reflection x -> -x.
  GaussianPacket mirrored() const { return GaussianPacket(a_, -b_, -c_, m_); }

  bool operator==(const GaussianPacket&) const = default;

 private:
  double a_, b_, c_, m_;
};

// Two identical particles, one in each packet, with statistics sign eta.
struct Scenario {
  GaussianPacket left;
  GaussianPacket right;
  int eta = 1;
  QuadratureControl quad{};

  Scenario(GaussianPacket l, GaussianPacket r, int eta_ = 1, QuadratureControl q = {});

  double mass() const { return left.m(); }
  double separation() const { return right.c() - left.c(); }
  bool equal_widths() const { return left.a() == right.a(); }
  // L <-> R exchange followed by a spatial reflection; leaves every
  // permutation-symmetric observable unchanged.
  Scenario swapped() const;
};

Complex momentum_amplitude(const GaussianPacket& pkt, double p, double t);
Complex position_amplitude(const GaussianPacket& pkt, double x, double t);
double momentum_density(const GaussianPacket& pkt, double p);
double position_density(const GaussianPacket& pkt, double x, double t);

// <left|right>; time independent under free evolution.
Complex overlap(const GaussianPacket& left, const GaussianPacket& right);

// W(x, p, t) = (1/pi) exp(-(x - c - p t/m)^2 / a^2 - (a p - b)^2)
double wigner(const GaussianPacket& pkt, double x, double p, double t);

}  // namespace dynsym
