#include "pendamp/dynamics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace pendamp {

Params::Params(double epsilon) : epsilon_(epsilon) {
  if (!(epsilon > 0.0) || !std::isfinite(epsilon)) {
    throw std::invalid_argument("epsilon must be a positive finite number, got " +
                                std::to_string(epsilon));
  }
}

const char* to_string(ZoneTag tag) {
  switch (tag) {
    case ZoneTag::Lower:
      return "lower";
    case ZoneTag::Upper:
      return "upper";
    case ZoneTag::None:
      break;
  }
  return "none";
}

double reduce_angle(double x) {
  double r = std::fmod(x + kPi, kTwoPi);
  if (r < 0.0) r += kTwoPi;
  return r - kPi;
}

PhaseRate vector_field(const PhaseState& s, double u, const Params& p) {
  if (!(std::abs(u) <= 1.0)) {
    throw std::domain_error("control value outside [-1, 1]: " + std::to_string(u));
  }
  return {s.y, -std::sin(s.x) + p.epsilon() * u};
}

double energy(const PhaseState& s) { return 0.5 * s.y * s.y + (1.0 - std::cos(s.x)); }

double controlled_hamiltonian(const PhaseState& s, int u, const Params& p) {
  if (u != 1 && u != -1) {
    throw std::domain_error("controlled_hamiltonian needs u in {-1, +1}");
  }
  return energy(s) - p.epsilon() * u * s.x;
}

ZoneTag standstill_zone(const PhaseState& s, const Params& p, double factor) {
  const double half_width = factor * p.epsilon();
  if (!(factor > 0.0) || !(half_width < 1.0)) {
    throw std::invalid_argument("standstill zone needs 0 < factor*epsilon < 1");
  }
  if (std::abs(std::sin(s.x)) < half_width && std::abs(s.y) < half_width) {
    return std::cos(s.x) > 0.0 ? ZoneTag::Lower : ZoneTag::Upper;
  }
  return ZoneTag::None;
}

double amplitude_for_energy(double E) {
  if (!(E >= 0.0 && E <= 2.0)) {
    throw std::domain_error("oscillation energy must lie in [0, 2]");
  }
  // 1 - cos(Phi) = 2 sin^2(Phi/2) keeps precision for small E.
  return 2.0 * std::asin(std::sqrt(0.5 * E));
}

}  // namespace pendamp
