#pragma once

#include <string>
#include <vector>

namespace pendamp {

/// State of x'' + x = u, |u| <= 1.
struct LinState {
  double x = 0.0;
  double y = 0.0;
};

/// One piece of the switching curve: the half of the unit circle around
/// (center, 0) with y > 0 (upper) or y < 0.
struct CurveArc {
  double center = 0.0;
  bool upper = false;
};

/// Switching curve of the minimum-time synthesis, built from the two terminal
/// arcs by repeated time-pi backward flow (point reflection through (+-1, 0)).
class SwitchingCurve {
 public:
  /// Covers |x| <= reach.
  explicit SwitchingCurve(double reach = 64.0);

  const std::vector<CurveArc>& arcs() const { return arcs_; }
  double reach() const { return reach_; }

  /// Height of the curve above x; throws std::domain_error beyond the reach.
  double height(double x) const;

  /// The arc covering x (x > 0: right branch, x < 0: left branch).
  const CurveArc& arc_at(double x) const;

 private:
  std::vector<CurveArc> arcs_;  // sorted by center
  double reach_;
};

/// -1 above the curve, +1 below; on the curve +1 for x > 0 and -1 for x < 0.
/// Throws std::invalid_argument at the origin.
int lin_feedback(const LinState& s);

struct LinSwitch {
  double t = 0.0;
  LinState state;
};

struct LinRun {
  double T = 0.0;
  int switches = 0;
  std::vector<LinSwitch> switch_points;
  std::vector<double> t;   // sampled trajectory
  std::vector<LinState> states;
  bool ok = true;
  std::string diagnostic;
};

/// Closed-loop run along exact circular arcs; each constant-u piece is a
/// clockwise rotation about (u, 0). `sample_step` > 0 also records samples.
LinRun lin_simulate(const LinState& p0, double sample_step = 0.0);

/// H_T(xi) = integral over [0, T] of |xi1 sin t + xi2 cos t|, in closed form.
double lin_support(double xi1, double xi2, double T);

/// sqrt(1 - 4/pi^2) - (2/pi) acos(2/pi).
double phi0_constant();

/// Integral of |cos t| over [0, T] minus 2T/pi.
double phi0_profile(double T);

struct Phi0Check {
  double closed_form = 0.0;
  double numeric_max = 0.0;
  double maximizer = 0.0;
  bool consistent = false;
};

/// Maximizes phi0_profile over (0, pi/2) by Brent's method and compares.
Phi0Check phi0_verify(double tol = 1e-10);

}  // namespace pendamp
