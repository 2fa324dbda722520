#pragma once

#include <array>
#include <numbers>

namespace pendamp {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Point of the pendulum phase cylinder. The angle lives on the covering line;
/// reduction modulo 2*pi only happens through reduce_angle().
struct PhaseState {
  double x = 0.0;
  double y = 0.0;
};

/// Derivative of a PhaseState.
struct PhaseRate {
  double dx = 0.0;
  double dy = 0.0;
};

/// Control amplitude of the torque, epsilon > 0.
class Params {
 public:
  explicit Params(double epsilon);

  double epsilon() const { return epsilon_; }

 private:
  double epsilon_;
};

/// Component of the standstill zone containing a state.
enum class ZoneTag { None, Lower, Upper };

const char* to_string(ZoneTag tag);

/// Maps an angle to [-pi, pi).
double reduce_angle(double x);

/// (y, -sin x + eps*u). Throws std::domain_error when |u| > 1.
PhaseRate vector_field(const PhaseState& s, double u, const Params& p);

/// y^2/2 + 1 - cos x.
double energy(const PhaseState& s);

/// y^2/2 + 1 - cos x - eps*u*x on the covering plane; conserved on arcs of
/// constant u in {-1, +1} (the potential of -sin x + eps*u is 1 - cos x - eps*u*x).
double controlled_hamiltonian(const PhaseState& s, int u, const Params& p);

/// Classifies s against {|sin x| < factor*eps, |y| < factor*eps}; the sign of
/// cos x separates the two components. Requires factor*eps < 1.
ZoneTag standstill_zone(const PhaseState& s, const Params& p, double factor = 2.0);

/// Angle Phi in [0, pi] with 1 - cos Phi = E, for E in [0, 2].
double amplitude_for_energy(double E);

}  // namespace pendamp
