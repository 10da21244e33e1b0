#pragma once

#include <functional>
#include <span>
#include <vector>

#include "dynsym/density_curve.hpp"
#include "dynsym/execution.hpp"
#include "dynsym/wavepacket.hpp"

namespace dynsym {

// Interval detector: projector onto [center - half_width, center + half_width].
struct Detector {
  double center = 0.0;
  double half_width = 1.0;
  void validate() const;
  bool operator==(const Detector&) const = default;
};

enum class StateKind { product, symmetrized, mixed };

// Product |L>|R>, its (anti)symmetrization, or the mixture
// (1 - p) product + p symmetrized.
struct TwoParticleState {
  StateKind kind;
  Scenario scenario;
  double p = 0.0;  // symmetrized weight, used only by mixed

  static TwoParticleState product(const Scenario& sc) { return {StateKind::product, sc, 0.0}; }
  static TwoParticleState symmetrized(const Scenario& sc) { return {StateKind::symmetrized, sc, 1.0}; }
  static TwoParticleState mixed(const Scenario& sc, double p);
  void validate() const;
};

// alpha |L R> + beta |R L>; need not be normalised.
struct TwoPacketKet {
  Complex alpha, beta;
};

TwoPacketKet product_ket();
TwoPacketKet symmetrized_ket(int eta);
// (1 + eta pi) / 2, the jump applied at the collision.
TwoPacketKet apply_symmetrizer(const TwoPacketKet& k, int eta);
// <k|k> given that <LR|RL> = |<L|R>|^2.
double ket_norm2(const TwoPacketKet& k, const Scenario& sc);

// 1 + eta |<L|R>|^2, the squared norm of |LR> + eta |RL> over 2. Throws
// DomainError when it vanishes (fermions in identical packets).
double symmetrized_norm(const Scenario& sc);

// Symmetric coordinate measurement at (x1, x2): the sum over both orderings.
double joint_coordinate_density(const TwoParticleState& st, double x1, double x2, double t);

struct DetectorElements {
  double PLL = 0.0;   // <L(t)|P|L(t)>
  double PRR = 0.0;   // <R(t)|P|R(t)>
  Complex PRL{};      // <R(t)|P|L(t)>
};

enum class ElementMethod { automatic, closed_form, quadrature };

// Closed forms need equal widths and opposite momenta (a_L = a_R, b_L = -b_R);
// otherwise closed_form throws ConventionError. automatic falls back to
// quadrature outside the conventions or where the complex erf would overflow.
bool closed_form_applies(const Scenario& sc);
DetectorElements detector_matrix_elements(const Scenario& sc, const Detector& det, double t,
                                          ElementMethod method = ElementMethod::automatic);

struct PairProbabilities {
  double both = 0.0, none = 0.0, one = 0.0;
};

PairProbabilities pair_detection_probability(const TwoPacketKet& k, const Scenario& sc,
                                             const DetectorElements& el);
PairProbabilities pair_detection_probability(const TwoParticleState& st, const Detector& det, double t,
                                             ElementMethod method = ElementMethod::automatic);

struct SignalCurve {
  std::vector<double> t;
  std::vector<double> direct;       // <L|P|L><R|P|R>
  std::vector<double> correlation;  // p_c(t) |<R|P|L>|^2
};

// p_c is read off pcurve (zero for t < 0); throws std::out_of_range when a
// grid time lies past the end of pcurve.
SignalCurve signal_curve(const Scenario& sc, const Detector& det, const DensityCurve& pcurve,
                         std::span<const double> t_grid, Execution exec = Execution::parallel);

enum class ProjectorMode { flat_window, two_branch };

// P_C = |C><C| specified through its overlaps. flat_window: amp_L = <C|L>,
// amp_R = <C|R>. two_branch: |C> = (|A1> + |A2>)/sqrt(2) with <A1|R> = <A2|L> = 0,
// amp_L = <A1|L>, amp_R = <A2|R>.
struct SuperpositionProjector {
  Complex amp_L{}, amp_R{};
  ProjectorMode mode = ProjectorMode::flat_window;
  void validate() const;
};

double superposition_detection(const TwoParticleState& st, const SuperpositionProjector& proj);

// <C|psi> for |C> flat on [center - r/2, center + r/2] with height r^{-1/2}.
Complex flat_window_amplitude(const GaussianPacket& pkt, double center, double r, double t,
                              const QuadratureControl& ctl = {});

enum class PacketRef { left, right };
struct WeightedPacket {
  double weight;
  PacketRef packet;
  bool operator==(const WeightedPacket&) const = default;
};
struct ReducedStates {
  std::vector<WeightedPacket> first, second;
};

// Single-particle states as packet mixtures. Mixed input throws
// std::invalid_argument.
ReducedStates reduced_states(const TwoParticleState& st);

// tr(sigma O) for an observable diagonal in position.
double expectation(std::span<const WeightedPacket> sigma, const Scenario& sc,
                   const std::function<double(double)>& observable, double t);

}  // namespace dynsym
