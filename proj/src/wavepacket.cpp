#include "dynsym/wavepacket.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

namespace dynsym {

namespace {
const double kPiQuarter = std::pow(std::numbers::pi, -0.25);
}

GaussianPacket::GaussianPacket(double a, double b, double c, double m) : a_(a), b_(b), c_(c), m_(m) {
  if (!(a > 0.0) || !std::isfinite(a)) throw std::invalid_argument(fmt::format("packet width a = {} must be > 0", a));
  if (!(m > 0.0) || !std::isfinite(m)) throw std::invalid_argument(fmt::format("mass m = {} must be > 0", m));
  if (!std::isfinite(b) || !std::isfinite(c)) throw std::invalid_argument("packet b and c must be finite");
}

double GaussianPacket::position_width(double t) const {
  const double tt = tau(t);
  return a_ / std::numbers::sqrt2 * std::sqrt(1.0 + tt * tt);
}

Scenario::Scenario(GaussianPacket l, GaussianPacket r, int eta_, QuadratureControl q)
    : left(l), right(r), eta(eta_), quad(q) {
  if (eta != 1 && eta != -1) throw std::invalid_argument(fmt::format("eta = {} must be +1 or -1", eta));
  if (left.m() != right.m())
    throw std::invalid_argument("identical particles need equal masses");
  quad.validate();
}

Scenario Scenario::swapped() const { return Scenario(right.mirrored(), left.mirrored(), eta, quad); }

Complex momentum_amplitude(const GaussianPacket& pkt, double p, double t) {
  if (!std::isfinite(t) || !std::isfinite(p)) throw std::invalid_argument("momentum_amplitude: non-finite argument");
  const double a = pkt.a(), b = pkt.b();
  const double re = -0.5 * b * b + p * b * a - 0.5 * a * a * p * p;
  const double im = -p * pkt.c() - t * p * p / (2.0 * pkt.m());
  return std::sqrt(a) * kPiQuarter * std::polar(std::exp(re), im);
}

Complex position_amplitude(const GaussianPacket& pkt, double x, double t) {
  if (!std::isfinite(t) || !std::isfinite(x)) throw std::invalid_argument("position_amplitude: non-finite argument");
  const double a = pkt.a(), b = pkt.b();
  const double xi = (x - pkt.c()) / a;
  const Complex s(1.0, pkt.tau(t));
  const Complex q = Complex(xi, -b);
  return kPiQuarter / std::sqrt(a * s) * std::exp(-0.5 * b * b - q * q / (2.0 * s));
}

double momentum_density(const GaussianPacket& pkt, double p) {
  const double z = pkt.a() * p - pkt.b();
  return pkt.a() * std::numbers::inv_sqrtpi * std::exp(-z * z);
}

double position_density(const GaussianPacket& pkt, double x, double t) {
  const double w = pkt.position_width(t);
  const double z = (x - pkt.center(t)) / w;
  return std::exp(-0.5 * z * z) / (w * std::sqrt(2.0 * std::numbers::pi));
}

Complex overlap(const GaussianPacket& left, const GaussianPacket& right) {
  // Gaussian integral of conj(chi_L) chi_R over p.
  const double aL = left.a(), aR = right.a();
  const double s = aL * aL + aR * aR;
  const Complex j(aL * left.b() + aR * right.b(), left.c() - right.c());
  const double bb = 0.5 * (left.b() * left.b() + right.b() * right.b());
  return std::sqrt(2.0 * aL * aR / s) * std::exp(j * j / (2.0 * s) - bb);
}

double wigner(const GaussianPacket& pkt, double x, double p, double t) {
  const double zx = (x - pkt.c() - p * t / pkt.m()) / pkt.a();
  const double zp = pkt.a() * p - pkt.b();
  return std::numbers::inv_pi * std::exp(-zx * zx - zp * zp);
}

}  // namespace dynsym
