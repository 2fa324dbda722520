#pragma once

#include <cstddef>
#include <optional>
#include <vector>

#include "pendamp/dynamics.hpp"
#include "pendamp/quadrature.hpp"

namespace pendamp {

inline constexpr double kDefaultLimitTol = 1e-10;

/// sin x / (2x), with the removable singularity filled in (value 1/2 at 0).
double sinc_half(double x);

/// G(X) = integral of sin x/(2x) over [0, X] by its power series; |X| <= 2*pi.
/// This is the time a limit path with U = -1 needs to bring X down to 0.
double half_sine_integral(double X);

/// Inverse of half_sine_integral on [0, pi]; g in [0, G(pi)].
double inverse_half_sine_integral(double g);

/// D = integral of sin x/(2x) over [0, pi] by adaptive quadrature; tol >= 1e-12.
QuadratureResult constant_D(double tol = 1e-12);

/// Integral over [0, pi/2] of (1 - k^2 sin^2 t)^(-1/2) with complementary
/// modulus kc = sqrt(1 - k^2) in (0, 1].
QuadratureResult quarter_period(double kc, double tol = kDefaultLimitTol);

/// Per-oscillation time integral of cos(phi) - cos(X) over phi in [0, X], X in (0, pi).
QuadratureResult swing_integral(double X, double tol = kDefaultLimitTol);

/// Integral of (1 + h - cos phi)^(-1/2) over a full turn, h > 0.
QuadratureResult turn_integral(double h, double tol = kDefaultLimitTol);

/// Integral of |cos s + 1 + h|^(-1/2) over [0, 2*pi] for 0 < |h| <= 1.
QuadratureResult period_integral(double h, double tol = kDefaultLimitTol);

/// Period of the free oscillation at energy E in (0, 2), computed from the
/// classically allowed part of the period integral.
QuadratureResult oscillation_period(double E, double tol = kDefaultLimitTol);

/// Time of one full free turn at energy E > 2.
QuadratureResult rotation_time(double E, double tol = kDefaultLimitTol);

QuadratureResult tau_minus(double E, double tol = kDefaultLimitTol);
QuadratureResult tau_plus(double E, double tol = kDefaultLimitTol);
QuadratureResult tau(double E, double tol = kDefaultLimitTol);

/// One turn at the x = pi section under dry friction: sqrt(y^2 - 4*pi*eps)
/// with the sign of y. Throws std::domain_error when y^2 <= 4*pi*eps.
double poincare_high(double y, const Params& p);

/// Next amplitude x' in (0, x) with cos x' - cos x = eps (x + x'), or nullopt
/// when no such root exists (the swing ends in the standstill zone).
std::optional<double> poincare_low(double x, const Params& p);

enum class EnergyZone { Low, High };

struct PoincareIterates {
  EnergyZone zone = EnergyZone::Low;
  std::vector<double> section;     // amplitudes x_n (low) or speeds y_n at x = pi (high)
  std::vector<double> energies;    // E_n
  std::vector<double> reduced;     // h_n = 2 - E_n (low) or E_n - 2 (high)
  std::vector<double> step_times;  // physical time from section n to n+1
  bool exhausted = false;          // last iterate has no successor
};

PoincareIterates iterate_poincare_low(double x0, const Params& p, bool with_times = true,
                                      std::size_t max_steps = 10'000'000);
PoincareIterates iterate_poincare_high(double y0, const Params& p, bool with_times = true,
                                       std::size_t max_steps = 10'000'000);

enum class LimitZone { Low, High };

/// Constant control value on a time interval. An infinite duration means
/// "until the target is reached".
struct ControlPiece {
  double duration = 0.0;
  double u = -1.0;
};

struct LimitPath {
  LimitZone zone = LimitZone::Low;
  std::vector<double> t;
  std::vector<double> value;    // X(t) or Y(t)
  std::vector<double> control;  // U on [t_i, t_{i+1}); the last entry repeats
  double total_time = 0.0;
  bool reached_target = false;  // X or Y hit 0
};

/// Closed-form solution of sin X/(2X) dX/dt = U (low) or Y dY/dt = 2 pi U (high)
/// on each constant piece, sampled every `step` time units.
LimitPath limit_ode_solve(LimitZone zone, double init, const std::vector<ControlPiece>& profile,
                          double step);

/// J = integral over the path of the per-oscillation time (swing_integral for
/// the low zone, turn_integral at h = Y^2/2 for the high zone).
QuadratureResult cost_functional(const LimitPath& path, double tol = 1e-9);

struct EulerRow {
  double epsilon = 0.0;
  std::size_t steps = 0;
  double sup_error = 0.0;
  double ratio = 0.0;  // sup_error / previous row's sup_error, NaN on the first row
};

/// Distance between the broken line through (n*eps, x_n) from poincare_low and
/// the U = -1 limit path started at x0.
std::vector<EulerRow> euler_convergence(double x0, const std::vector<double>& eps_list);

}  // namespace pendamp
