#include "pendamp/linosc.hpp"

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace pendamp {

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kTwoPi = 2.0 * std::numbers::pi;

// Clockwise angle in [0, 2 pi) that carries direction a onto direction b.
double clockwise_angle(double ax, double ay, double bx, double by) {
  double d = std::atan2(ay, ax) - std::atan2(by, bx);
  d = std::fmod(d, kTwoPi);
  if (d < 0.0) d += kTwoPi;
  return d;
}

// Antiderivative of |cos| vanishing at 0.
double abs_cos_integral(double s) {
  const double k = std::floor((s + 0.5 * kPi) / kPi);
  return 2.0 * k + std::sin(s - k * kPi);
}

}  // namespace

SwitchingCurve::SwitchingCurve(double reach) : reach_(reach) {
  if (!(reach >= 0.0) || !std::isfinite(reach)) {
    throw std::invalid_argument("SwitchingCurve: reach must be finite and nonnegative");
  }
  // Terminal arcs into the origin: u = +1 along the lower circle around (1, 0),
  // u = -1 along the upper circle around (-1, 0). Flowing backward for time pi
  // under the other control reflects an arc through (-+1, 0).
  for (CurveArc arc : {CurveArc{1.0, false}, CurveArc{-1.0, true}}) {
    bool through_minus = arc.center > 0.0;
    while (std::abs(arc.center) - 1.0 <= reach_) {
      arcs_.push_back(arc);
      const double pivot = through_minus ? -1.0 : 1.0;
      arc = {2.0 * pivot - arc.center, !arc.upper};
      through_minus = !through_minus;
    }
  }
  std::sort(arcs_.begin(), arcs_.end(),
            [](const CurveArc& a, const CurveArc& b) { return a.center < b.center; });
}

const CurveArc& SwitchingCurve::arc_at(double x) const {
  if (!(std::abs(x) <= reach_)) {
    throw std::domain_error("SwitchingCurve: x beyond the generated reach");
  }
  const double center = x >= 0.0 ? 2.0 * std::floor(0.5 * x) + 1.0
                                  : -(2.0 * std::floor(-0.5 * x) + 1.0);
  auto it = std::lower_bound(arcs_.begin(), arcs_.end(), center - 0.5,
                             [](const CurveArc& a, double c) { return a.center < c; });
  if (it == arcs_.end() || std::abs(it->center - center) > 0.5) {
    // x sits exactly on the outer edge of the last arc.
    it = x >= 0.0 ? arcs_.end() - 1 : arcs_.begin();
  }
  return *it;
}

double SwitchingCurve::height(double x) const {
  const auto& arc = arc_at(x);
  const double dx = x - arc.center;
  const double v = std::sqrt(std::max(0.0, 1.0 - dx * dx));
  return arc.upper ? v : -v;
}

int lin_feedback(const LinState& s) {
  if (s.x == 0.0 && s.y == 0.0) throw std::invalid_argument("lin_feedback: undefined at the origin");
  const SwitchingCurve curve(std::abs(s.x) + 2.0);
  const double h = curve.height(s.x);
  if (std::abs(s.y - h) <= 1e-12 * std::max(1.0, std::abs(s.y))) return s.x > 0.0 ? 1 : -1;
  return s.y > h ? -1 : 1;
}

LinRun lin_simulate(const LinState& p0, double sample_step) {
  if (!std::isfinite(p0.x) || !std::isfinite(p0.y)) {
    throw std::invalid_argument("lin_simulate: initial state must be finite");
  }
  LinRun run;
  LinState s = p0;
  double t = 0.0;
  run.t.push_back(t);
  run.states.push_back(s);
  if (s.x == 0.0 && s.y == 0.0) return run;

  const double radius = std::hypot(std::abs(s.x) + 1.0, s.y);
  const SwitchingCurve curve(radius + 4.0);

  auto record_arc = [&](double u, double span) {
    if (!(sample_step > 0.0)) return;
    const double wx = s.x - u, wy = s.y;
    for (double tau = sample_step; tau < span; tau += sample_step) {
      const double c = std::cos(tau), sn = std::sin(tau);
      run.t.push_back(t + tau);
      run.states.push_back({u + wx * c + wy * sn, wy * c - wx * sn});
    }
  };

  int u = lin_feedback(s);
  constexpr int kMaxArcs = 1'000'000;
  for (int arcs = 0; arcs < kMaxArcs; ++arcs) {
    const double wx = s.x - u, wy = s.y;
    const double R = std::hypot(wx, wy);

    // Terminal arc: the unit circle around (u, 0) on the half that runs into the origin.
    const bool terminal_half = u > 0 ? (s.y <= 1e-12 && s.x >= -1e-12) : (s.y >= -1e-12 && s.x <= 1e-12);
    if (std::abs(R - 1.0) <= 1e-9 && terminal_half) {
      const double span = clockwise_angle(wx, wy, -u, 0.0);
      record_arc(u, span);
      t += span;
      s = {0.0, 0.0};
      run.t.push_back(t);
      run.states.push_back(s);
      run.T = t;
      return run;
    }

    // First hit of the opposite branch of the curve while rotating clockwise.
    double best = std::numeric_limits<double>::infinity();
    LinState hit;
    for (const auto& arc : curve.arcs()) {
      if ((u < 0) != (arc.center > 0.0)) continue;
      const double d = arc.center - u;
      const double a = (R * R - 1.0 + d * d) / (2.0 * d);
      if (std::abs(a) > R) continue;
      double hy = std::sqrt(std::max(0.0, R * R - a * a));
      if (!arc.upper) hy = -hy;
      const double angle = clockwise_angle(wx, wy, a, hy);
      if (angle > 1e-12 && angle < best) {
        best = angle;
        hit = {u + a, hy};
      }
    }
    if (!std::isfinite(best)) {
      run.ok = false;
      run.diagnostic = "arc chaining failed: no switching point ahead";
      run.T = t;
      return run;
    }
    record_arc(u, best);
    t += best;
    s = hit;
    run.t.push_back(t);
    run.states.push_back(s);
    run.switch_points.push_back({t, s});
    ++run.switches;
    u = -u;
  }
  run.ok = false;
  run.diagnostic = "arc limit reached";
  run.T = t;
  return run;
}

double lin_support(double xi1, double xi2, double T) {
  if (!(T >= 0.0) || !std::isfinite(T)) throw std::invalid_argument("lin_support: T must be >= 0");
  const double r = std::hypot(xi1, xi2);
  if (r == 0.0) return 0.0;
  // xi1 sin t + xi2 cos t = |xi| cos(t - alpha)
  const double alpha = std::atan2(xi1, xi2);
  return r * (abs_cos_integral(T - alpha) - abs_cos_integral(-alpha));
}

double phi0_constant() {
  const double c = 2.0 / kPi;
  return std::sqrt(1.0 - c * c) - c * std::acos(c);
}

double phi0_profile(double T) { return abs_cos_integral(T) - 2.0 * T / kPi; }

Phi0Check phi0_verify(double tol) {
  Phi0Check out;
  out.closed_form = phi0_constant();
  auto neg = [](double T) { return -phi0_profile(T); };
  std::uintmax_t iters = 200;
  auto [Tstar, value] = boost::math::tools::brent_find_minima(neg, 0.0, 0.5 * kPi, 40, iters);
  out.maximizer = Tstar;
  out.numeric_max = -value;
  out.consistent = std::abs(out.numeric_max - out.closed_form) <= tol;
  return out;
}

}  // namespace pendamp
