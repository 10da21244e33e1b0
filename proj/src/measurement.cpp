#include "dynsym/measurement.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <stdexcept>

#include <fmt/format.h>

#include "dynsym/errors.hpp"
#include "dynsym/quantum_arrival.hpp"

namespace dynsym {

namespace {

// Exchange-free and exchange parts of <psi|X|psi> for a symmetric two-body
// operator X: <LR|X|LR> = <RL|X|RL> = direct, <LR|X|RL> = exchange (real).
struct SymmetricElement {
  double direct, exchange;
};

double expect(const TwoPacketKet& k, const SymmetricElement& e) {
  const double diag = std::norm(k.alpha) + std::norm(k.beta);
  const double cross = 2.0 * std::real(std::conj(k.alpha) * k.beta);
  return diag * e.direct + cross * e.exchange;
}

// (erf(hi) - erf(lo)) / 2 without cancellation in the tails.
double erf_window(double lo, double hi) {
  if (lo > 0.0) return 0.5 * (std::erfc(lo) - std::erfc(hi));
  if (hi < 0.0) return 0.5 * (std::erfc(-hi) - std::erfc(-lo));
  return 0.5 * (std::erf(hi) - std::erf(lo));
}

// P_LL-type element in closed form; valid for any single packet.
double window_probability(const GaussianPacket& pkt, const Detector& det, double t) {
  const double w = pkt.a() * std::sqrt(1.0 + pkt.tau(t) * pkt.tau(t));
  const double c = pkt.center(t);
  return erf_window((det.center - det.half_width - c) / w, (det.center + det.half_width - c) / w);
}

std::vector<double> window_breakpoints(const Scenario& sc, const Detector& det, double t) {
  const double lo = det.center - det.half_width, hi = det.center + det.half_width;
  std::vector<double> pts{lo, hi};
  for (const auto* pkt : {&sc.left, &sc.right}) {
    const double c = pkt->center(t), s = pkt->position_width(t);
    for (double k : {-10.0, -4.0, 0.0, 4.0, 10.0}) {
      const double x = c + k * s;
      if (x > lo && x < hi) pts.push_back(x);
    }
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

DetectorElements elements_by_quadrature(const Scenario& sc, const Detector& det, double t) {
  const auto pts = window_breakpoints(sc, det, t);
  DetectorElements out;
  out.PLL = integrate_adaptive([&](double x) { return position_density(sc.left, x, t); }, pts, sc.quad).value;
  out.PRR = integrate_adaptive([&](double x) { return position_density(sc.right, x, t); }, pts, sc.quad).value;
  out.PRL = integrate_adaptive(
                [&](double x) { return std::conj(position_amplitude(sc.right, x, t)) * position_amplitude(sc.left, x, t); },
                pts, sc.quad)
                .value;
  return out;
}

DetectorElements elements_closed_form(const Scenario& sc, const Detector& det, double t) {
  const double a = sc.left.a(), b = sc.left.b();
  const double d = sc.separation();
  const double mid = 0.5 * (sc.left.c() + sc.right.c());
  const double tau = sc.left.tau(t);
  const double w = a * std::sqrt(1.0 + tau * tau);
  const double kappa = (a * b + 0.5 * tau * d) / w;
  const Complex hi((det.center + det.half_width - mid) / w, -kappa);
  const Complex lo((det.center - det.half_width - mid) / w, -kappa);
  const double pref = std::exp(-b * b - d * d / (4.0 * a * a));
  DetectorElements out;
  out.PLL = window_probability(sc.left, det, t);
  out.PRR = window_probability(sc.right, det, t);
  out.PRL = 0.5 * pref * (erf_saturating(hi) - erf_saturating(lo));
  return out;
}

void check_time(double t, const char* who) {
  if (!std::isfinite(t)) throw std::invalid_argument(fmt::format("{}: non-finite time", who));
}

}  // namespace

void Detector::validate() const {
  if (!std::isfinite(center)) throw std::invalid_argument("detector center must be finite");
  if (!(half_width > 0.0) || !std::isfinite(half_width))
    throw std::invalid_argument(fmt::format("detector half_width = {} must be finite and > 0", half_width));
}

TwoParticleState TwoParticleState::mixed(const Scenario& sc, double p) {
  TwoParticleState st{StateKind::mixed, sc, p};
  st.validate();
  return st;
}

void TwoParticleState::validate() const {
  if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(fmt::format("mixture weight p = {} outside [0, 1]", p));
}

TwoPacketKet product_ket() { return {1.0, 0.0}; }

TwoPacketKet symmetrized_ket(int eta) {
  const double s = std::numbers::sqrt2 / 2.0;
  return {s, eta * s};
}

TwoPacketKet apply_symmetrizer(const TwoPacketKet& k, int eta) {
  return {0.5 * (k.alpha + double(eta) * k.beta), 0.5 * (k.beta + double(eta) * k.alpha)};
}

double ket_norm2(const TwoPacketKet& k, const Scenario& sc) {
  return expect(k, {1.0, std::norm(overlap(sc.left, sc.right))});
}

double symmetrized_norm(const Scenario& sc) {
  const double n = 1.0 + sc.eta * std::norm(overlap(sc.left, sc.right));
  if (!(n > 1e-14))
    throw DomainError("antisymmetrised state vanishes: the two packets coincide");
  return n;
}

namespace {

double ket_joint_density(const TwoPacketKet& k, const Scenario& sc, double x1, double x2, double t) {
  const Complex l1 = position_amplitude(sc.left, x1, t), l2 = position_amplitude(sc.left, x2, t);
  const Complex r1 = position_amplitude(sc.right, x1, t), r2 = position_amplitude(sc.right, x2, t);
  // Multiply the single-particle factors first so that the two orderings
  // cancel exactly at x1 = x2 for fermions.
  const Complex a12 = k.alpha * (l1 * r2) + k.beta * (r1 * l2);
  const Complex a21 = k.alpha * (l2 * r1) + k.beta * (r2 * l1);
  return std::norm(a12) + std::norm(a21);
}

double symmetrized_weight(const TwoParticleState& st) {
  st.validate();
  switch (st.kind) {
    case StateKind::product:
      return 0.0;
    case StateKind::symmetrized:
      return 1.0;
    case StateKind::mixed:
      break;
  }
  return st.p;
}

// Convex combination over the two pure components; per_ket(k, norm) returns
// the unnormalised expectation in ket k divided by norm.
template <class F>
double mix(const TwoParticleState& st, F&& per_ket) {
  const double w = symmetrized_weight(st);
  double out = 0.0;
  if (w < 1.0) out += (1.0 - w) * per_ket(product_ket(), 1.0);
  if (w > 0.0) out += w * per_ket(symmetrized_ket(st.scenario.eta), symmetrized_norm(st.scenario));
  return out;
}

}  // namespace

double joint_coordinate_density(const TwoParticleState& st, double x1, double x2, double t) {
  check_time(t, "joint_coordinate_density");
  const auto& sc = st.scenario;
  return mix(st, [&](const TwoPacketKet& k, double norm) { return ket_joint_density(k, sc, x1, x2, t) / norm; });
}

bool closed_form_applies(const Scenario& sc) {
  return sc.left.a() == sc.right.a() && sc.left.b() == -sc.right.b();
}

DetectorElements detector_matrix_elements(const Scenario& sc, const Detector& det, double t, ElementMethod method) {
  det.validate();
  check_time(t, "detector_matrix_elements");
  switch (method) {
    case ElementMethod::quadrature:
      return elements_by_quadrature(sc, det, t);
    case ElementMethod::closed_form:
      if (!closed_form_applies(sc))
        throw ConventionError(fmt::format(
            "closed-form detector elements need a_L = a_R and b_L = -b_R (got a = {}, {}; b = {}, {})",
            sc.left.a(), sc.right.a(), sc.left.b(), sc.right.b()));
      return elements_closed_form(sc, det, t);
    case ElementMethod::automatic:
      break;
  }
  if (closed_form_applies(sc)) {
    try {
      return elements_closed_form(sc, det, t);
    } catch (const DomainError&) {
      // erf outside its accurate range; the integral itself is tame
    }
  }
  return elements_by_quadrature(sc, det, t);
}

PairProbabilities pair_detection_probability(const TwoPacketKet& k, const Scenario& sc, const DetectorElements& el) {
  const Complex O = overlap(sc.left, sc.right);
  const double PLL = el.PLL, PRR = el.PRR;
  const double x2 = std::norm(el.PRL);
  const double oxr = std::real(O * el.PRL);
  const double norm = ket_norm2(k, sc);
  if (!(norm > 1e-14)) throw DomainError("pair_detection_probability: null two-particle state");
  PairProbabilities out;
  out.both = expect(k, {PLL * PRR, x2}) / norm;
  out.none = expect(k, {(1.0 - PLL) * (1.0 - PRR), std::norm(O) - 2.0 * oxr + x2}) / norm;
  out.one = expect(k, {PLL * (1.0 - PRR) + (1.0 - PLL) * PRR, 2.0 * oxr - 2.0 * x2}) / norm;
  return out;
}

PairProbabilities pair_detection_probability(const TwoParticleState& st, const Detector& det, double t,
                                             ElementMethod method) {
  const auto& sc = st.scenario;
  const double w = symmetrized_weight(st);
  const auto el = detector_matrix_elements(sc, det, t, method);
  PairProbabilities out;
  if (w < 1.0) {
    const auto p = pair_detection_probability(product_ket(), sc, el);
    out.both += (1.0 - w) * p.both;
    out.none += (1.0 - w) * p.none;
    out.one += (1.0 - w) * p.one;
  }
  if (w > 0.0) {
    const auto s = pair_detection_probability(symmetrized_ket(sc.eta), sc, el);
    out.both += w * s.both;
    out.none += w * s.none;
    out.one += w * s.one;
  }
  return out;
}

SignalCurve signal_curve(const Scenario& sc, const Detector& det, const DensityCurve& pcurve,
                         std::span<const double> t_grid, Execution exec) {
  det.validate();
  const auto cum = cumulative_probability(pcurve);
  auto p_c = [&](double t) {
    if (t <= 0.0) return 0.0;
    if (t > cum.t.back())
      throw std::out_of_range(fmt::format("signal_curve: t = {} beyond the collision-density grid", t));
    auto it = std::lower_bound(cum.t.begin(), cum.t.end(), t);
    const auto j = static_cast<std::size_t>(it - cum.t.begin());
    if (cum.t[j] == t) return cum.p[j];
    const double f = (t - cum.t[j - 1]) / (cum.t[j] - cum.t[j - 1]);
    return cum.p[j - 1] + f * (cum.p[j] - cum.p[j - 1]);
  };

  SignalCurve out;
  out.t.assign(t_grid.begin(), t_grid.end());
  out.direct.resize(t_grid.size());
  out.correlation.resize(t_grid.size());
  const auto n = static_cast<std::ptrdiff_t>(t_grid.size());
  std::exception_ptr failure;
  auto body = [&](std::ptrdiff_t i) {
    const auto el = detector_matrix_elements(sc, det, t_grid[i]);
    out.direct[i] = el.PLL * el.PRR;
    out.correlation[i] = p_c(t_grid[i]) * std::norm(el.PRL);
  };
  if (exec == Execution::parallel) {
#pragma omp parallel for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i) {
      try {
        body(i);
      } catch (...) {
#pragma omp critical(dynsym_signal_failure)
        if (!failure) failure = std::current_exception();
      }
    }
  } else {
    for (std::ptrdiff_t i = 0; i < n; ++i) body(i);
  }
  if (failure) std::rethrow_exception(failure);
  return out;
}

void SuperpositionProjector::validate() const {
  if (!(std::abs(amp_L) <= 1.0 + 1e-12) || !(std::abs(amp_R) <= 1.0 + 1e-12))
    throw std::invalid_argument("superposition projector overlaps must have modulus <= 1");
}

double superposition_detection(const TwoParticleState& st, const SuperpositionProjector& proj) {
  proj.validate();
  const double scale = proj.mode == ProjectorMode::two_branch ? std::numbers::sqrt2 / 2.0 : 1.0;
  const Complex cL = scale * proj.amp_L, cR = scale * proj.amp_R;
  auto one = [&](const TwoPacketKet& k, double norm) {
    // <C C|psi>; the two orderings cancel exactly for fermions
    return std::norm(k.alpha * (cL * cR) + k.beta * (cR * cL)) / norm;
  };
  return mix(st, one);
}

Complex flat_window_amplitude(const GaussianPacket& pkt, double center, double r, double t,
                              const QuadratureControl& ctl) {
  if (!(r > 0.0)) throw std::invalid_argument("flat_window_amplitude: window length must be > 0");
  const double lo = center - 0.5 * r, hi = center + 0.5 * r;
  std::vector<double> pts{lo, hi};
  const double c = pkt.center(t), s = pkt.position_width(t);
  for (double k : {-10.0, 0.0, 10.0})
    if (c + k * s > lo && c + k * s < hi) pts.push_back(c + k * s);
  std::sort(pts.begin(), pts.end());
  const auto res = integrate_adaptive([&](double x) { return position_amplitude(pkt, x, t); }, pts, ctl);
  return res.value / std::sqrt(r);
}

ReducedStates reduced_states(const TwoParticleState& st) {
  switch (st.kind) {
    case StateKind::product:
      return {{{1.0, PacketRef::left}}, {{1.0, PacketRef::right}}};
    case StateKind::symmetrized:
      return {{{0.5, PacketRef::left}, {0.5, PacketRef::right}}, {{0.5, PacketRef::left}, {0.5, PacketRef::right}}};
    case StateKind::mixed:
      break;
  }
  throw std::invalid_argument("reduced states are assigned only for the product and symmetrised pure states");
}

double expectation(std::span<const WeightedPacket> sigma, const Scenario& sc,
                   const std::function<double(double)>& observable, double t) {
  double sum = 0.0;
  for (const auto& wp : sigma) {
    const auto& pkt = wp.packet == PacketRef::left ? sc.left : sc.right;
    const auto res = integrate_real_line([&](double x) { return position_density(pkt, x, t) * observable(x); },
                                         pkt.center(t), pkt.position_width(t), sc.quad);
    sum += wp.weight * res.value;
  }
  return sum;
}

}  // namespace dynsym
