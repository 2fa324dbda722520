#include "pendamp/limits.hpp"

#include <boost/math/tools/roots.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pendamp {

namespace {

constexpr double kSqrt2 = std::numbers::sqrt2;
constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

double nested_tol(double tol) { return std::max(tol * 1e-2, 1e-14); }

// 2 sin(a/2) / a for a >= 0, smooth through a = 0.
double sin_ratio(double a) {
  if (a < 1e-4) return 1.0 - a * a / 24.0;
  return 2.0 * std::sin(0.5 * a) / a;
}

void check_tol(double tol) {
  if (!(tol > 0.0) || !std::isfinite(tol)) {
    throw std::invalid_argument("quadrature tolerance must be positive");
  }
}

// Tracks inner quadratures run inside an outer integrand.
struct InnerStats {
  std::size_t evaluations = 0;
  double worst_relative_error = 0.0;
  bool converged = true;

  double take(const QuadratureResult& r) {
    evaluations += r.evaluations;
    converged = converged && r.converged;
    if (r.value != 0.0) {
      worst_relative_error = std::max(worst_relative_error, r.error_estimate / std::abs(r.value));
    }
    return r.value;
  }
};

QuadratureResult finish(QuadratureResult outer, const InnerStats& inner, double scale, double tol) {
  QuadratureResult out;
  out.value = scale * outer.value;
  out.error_estimate =
      std::abs(scale) * outer.error_estimate + inner.worst_relative_error * std::abs(out.value);
  out.evaluations = outer.evaluations + inner.evaluations;
  out.converged = outer.converged && inner.converged &&
                  out.error_estimate <= tol * std::max(1.0, std::abs(out.value));
  return out;
}

QuadratureResult sum(const QuadratureResult& a, const QuadratureResult& b, double scale,
                     double tol) {
  QuadratureResult out;
  out.value = scale * (a.value + b.value);
  out.error_estimate = std::abs(scale) * (a.error_estimate + b.error_estimate);
  out.evaluations = a.evaluations + b.evaluations;
  out.converged = a.converged && b.converged &&
                  out.error_estimate <= tol * std::max(1.0, std::abs(out.value));
  return out;
}

// Twice the integral of (cos s - cos X)^(-1/2) over [0, X], i.e. the part of
// the full-circle period integral where the pendulum actually moves. With
// s = X - w^2 both factors of cos s - cos X = 2 sin(w^2/2) sin(X - w^2/2) are
// evaluated without cancellation.
QuadratureResult allowed_part(double X, double tol) {
  auto f = [X](double w) {
    double w2 = w * w;
    return 4.0 / std::sqrt(sin_ratio(w2) * std::sin(X - 0.5 * w2));
  };
  return gauss_kronrod(f, 0.0, std::sqrt(X), tol);
}

// Twice the integral over d in [0, d0] of (2 sin^2(d0/2) - 2 sin^2(d/2))^(-1/2),
// d being the distance from s = pi.
QuadratureResult forbidden_part(double d0, double tol) {
  auto f = [d0](double w) {
    double w2 = w * w;
    return 4.0 / std::sqrt(sin_ratio(w2) * std::sin(d0 - 0.5 * w2));
  };
  return gauss_kronrod(f, 0.0, std::sqrt(d0), tol);
}

// Time of the half swing (x, 0) -> (-xp, 0) under u = +1, where
// y^2/2 = cos s - cos x - eps (x - s). The substitution
// s = x - (x + xp) cos^2(theta/2) removes both square-root endpoints.
double half_swing_time(double x, double xp, double eps) {
  const double span = x + xp;
  auto f = [=](double theta) {
    double c = std::cos(0.5 * theta);
    double dist = span * c * c;  // x - s
    double F = 2.0 * std::sin(0.5 * dist) * std::sin(x - 0.5 * dist) - eps * dist;
    if (!(F > 0.0)) return 0.0;
    return 0.5 * span * std::sin(theta) / std::sqrt(2.0 * F);
  };
  return gauss_kronrod(f, 0.0, kPi, 1e-10).value;
}

// Time of one turn from the x = pi section with speed y > 0 under u = -1.
double full_turn_time(double y, double eps) {
  auto f = [=](double r) {
    double s = std::sin(0.5 * r);
    return 1.0 / std::sqrt(y * y + 4.0 * s * s - 2.0 * eps * r);
  };
  return gauss_kronrod(f, 0.0, kTwoPi, 1e-10).value;
}

}  // namespace

double sinc_half(double x) {
  if (std::abs(x) < 1e-4) return 0.5 - x * x / 12.0;
  return std::sin(x) / (2.0 * x);
}

double half_sine_integral(double X) {
  if (!(std::abs(X) <= kTwoPi)) {
    throw std::domain_error("half_sine_integral: |X| must not exceed 2*pi");
  }
  // Si(X) = sum (-1)^n X^(2n+1) / ((2n+1) (2n+1)!)
  const double x2 = X * X;
  double power = X;  // X^(2n+1) / (2n+1)!
  double total = 0.0;
  for (int n = 0; n < 60; ++n) {
    double term = power / (2 * n + 1);
    total += term;
    if (std::abs(term) < 1e-18 * std::abs(total)) break;
    power *= -x2 / ((2.0 * n + 2.0) * (2.0 * n + 3.0));
  }
  return 0.5 * total;
}

double inverse_half_sine_integral(double g) {
  static const double g_max = half_sine_integral(kPi);
  if (!(g >= 0.0) || g > g_max * (1.0 + 1e-14)) {
    throw std::domain_error("inverse_half_sine_integral: value outside [0, G(pi)]");
  }
  if (g == 0.0) return 0.0;
  if (g >= g_max) return kPi;
  auto residual = [g](double x) { return half_sine_integral(x) - g; };
  std::uintmax_t iters = 200;
  auto tol = [](double a, double b) { return std::abs(b - a) <= 4e-16 * std::max(1.0, std::abs(a)); };
  auto [lo, hi] = boost::math::tools::toms748_solve(residual, 0.0, kPi, -g, g_max - g, tol, iters);
  return 0.5 * (lo + hi);
}

QuadratureResult constant_D(double tol) {
  if (!(tol >= 1e-12) || !std::isfinite(tol)) {
    throw std::invalid_argument("constant_D: tolerance must be at least 1e-12");
  }
  auto r = gauss_kronrod([](double x) { return sinc_half(x); }, 0.0, kPi, 0.1 * tol);
  r.converged = r.converged && r.error_estimate <= tol;
  return r;
}

QuadratureResult quarter_period(double kc, double tol) {
  check_tol(tol);
  if (!(kc > 0.0 && kc <= 1.0)) {
    throw std::domain_error("quarter_period: complementary modulus must lie in (0, 1]");
  }
  // cot(theta) = kc sinh(v) maps the integral onto [0, inf) with integrand
  // (1 + kc^2 sinh^2 v)^(-1/2); the tail past V is below 1e-17.
  const double V = std::log(2.0 / kc) + 40.0;
  auto f = [kc](double v) { return 1.0 / std::hypot(1.0, kc * std::sinh(v)); };
  return gauss_kronrod(f, 0.0, V, tol);
}

QuadratureResult swing_integral(double X, double tol) {
  if (!(X > 0.0 && X < kPi)) {
    throw std::domain_error("swing_integral: amplitude must lie in (0, pi)");
  }
  auto r = quarter_period(std::cos(0.5 * X), tol);
  r.value *= kSqrt2;
  r.error_estimate *= kSqrt2;
  return r;
}

QuadratureResult turn_integral(double h, double tol) {
  check_tol(tol);
  if (!(h > 0.0) || !std::isfinite(h)) {
    throw std::domain_error("turn_integral: h must be positive");
  }
  // Integrand in d = |s - pi| is (h + 2 sin^2(d/2))^(-1/2), peaked at d = 0
  // with width sqrt(h). On [0, pi/2] use sin(d/2) = sqrt(h/2) sinh(v).
  const double a = std::sqrt(0.5 * h);
  auto near = [a](double v) {
    double s = a * std::sinh(v);
    return kSqrt2 / std::sqrt(1.0 - s * s);
  };
  auto far = [h](double d) {
    double s = std::sin(0.5 * d);
    return 1.0 / std::sqrt(h + 2.0 * s * s);
  };
  auto r1 = gauss_kronrod(near, 0.0, std::asinh(1.0 / std::sqrt(h)), 0.5 * tol);
  auto r2 = gauss_kronrod(far, 0.5 * kPi, kPi, 0.5 * tol);
  return sum(r1, r2, 2.0, tol);
}

QuadratureResult period_integral(double h, double tol) {
  check_tol(tol);
  if (!std::isfinite(h) || h == 0.0 || std::abs(h) > 1.0) {
    throw std::domain_error("period_integral: need 0 < |h| <= 1, got " + std::to_string(h));
  }
  if (h > 0.0) return turn_integral(h, tol);
  const double r = std::sqrt(-0.5 * h);
  auto allowed = allowed_part(2.0 * std::acos(r), 0.5 * tol);
  auto forbidden = forbidden_part(2.0 * std::asin(r), 0.5 * tol);
  return sum(allowed, forbidden, 1.0, tol);
}

QuadratureResult oscillation_period(double E, double tol) {
  check_tol(tol);
  if (!(E > 0.0 && E < 2.0)) {
    throw std::domain_error("oscillation_period: energy must lie in (0, 2)");
  }
  auto r = allowed_part(amplitude_for_energy(E), tol);
  r.value *= kSqrt2;
  r.error_estimate *= kSqrt2;
  return r;
}

QuadratureResult rotation_time(double E, double tol) {
  if (!(E > 2.0)) throw std::domain_error("rotation_time: energy must exceed 2");
  auto r = turn_integral(E - 2.0, tol);
  r.value /= kSqrt2;
  r.error_estimate /= kSqrt2;
  return r;
}

QuadratureResult tau_minus(double E, double tol) {
  check_tol(tol);
  if (!(E > 0.0 && E <= 2.0)) {
    throw std::domain_error("tau_minus: energy must lie in (0, 2]");
  }
  const double Phi = amplitude_for_energy(E);
  const double inner = nested_tol(tol);
  InnerStats stats;
  // (1/sqrt2) (sin x/x) * sqrt2 K = (sin x/x) K with K the quarter period.
  auto f = [&](double x) {
    double kc = std::cos(0.5 * x);
    if (!(kc > 0.0)) return 0.0;
    return 2.0 * sinc_half(x) * stats.take(quarter_period(std::min(kc, 1.0), inner));
  };
  auto outer = tanh_sinh(f, 0.0, Phi, 0.5 * tol);
  auto result = finish(outer, stats, 1.0, tol);
  if (E == 2.0 && result.converged) {
    // Improper at x = pi: redo as a proper integral plus an endpoint piece
    // and require agreement.
    constexpr double delta = 1e-2;
    InnerStats split_stats;
    auto g = [&](double x) {
      double kc = std::cos(0.5 * x);
      if (!(kc > 0.0)) return 0.0;
      return 2.0 * sinc_half(x) * split_stats.take(quarter_period(std::min(kc, 1.0), inner));
    };
    auto body = gauss_kronrod(g, 0.0, kPi - delta, 0.25 * tol);
    auto tail = tanh_sinh(g, kPi - delta, kPi, 0.25 * tol);
    double split_value = body.value + tail.value;
    result.evaluations += body.evaluations + tail.evaluations + split_stats.evaluations;
    double gap = std::abs(split_value - result.value);
    result.error_estimate = std::max(result.error_estimate, gap);
    // The endpoint piece is ~1e-4, so judge it by absolute error only.
    const double piece_error = body.error_estimate + tail.error_estimate;
    result.error_estimate = std::max(result.error_estimate, piece_error);
    result.converged = std::isfinite(split_value) &&
                       result.error_estimate <= tol * std::max(1.0, result.value);
  }
  return result;
}

QuadratureResult tau_plus(double E, double tol) {
  check_tol(tol);
  if (!(E >= 2.0) || !std::isfinite(E)) {
    throw std::domain_error("tau_plus: energy must be at least 2");
  }
  if (E == 2.0) return {};
  const double inner = nested_tol(tol);
  InnerStats stats;
  auto f = [&](double h) {
    if (!(h > 0.0)) return 0.0;
    return stats.take(turn_integral(h, inner));
  };
  auto outer = tanh_sinh(f, 0.0, E - 2.0, 0.5 * tol);
  return finish(outer, stats, 1.0 / (2.0 * kSqrt2 * kPi), tol);
}

QuadratureResult tau(double E, double tol) {
  if (!(E > 0.0) || !std::isfinite(E)) throw std::domain_error("tau: energy must be positive");
  if (E <= 2.0) return tau_minus(E, tol);
  auto plus = tau_plus(E, 0.5 * tol);
  auto minus = tau_minus(2.0, 0.5 * tol);
  return sum(plus, minus, 1.0, tol);
}

double poincare_high(double y, const Params& p) {
  const double drop = 4.0 * kPi * p.epsilon();
  if (!(y * y > drop)) {
    throw std::domain_error("poincare_high: speed too low for another full turn");
  }
  return std::copysign(std::sqrt(y * y - drop), y);
}

std::optional<double> poincare_low(double x, const Params& p) {
  if (!(x > 0.0 && x < kPi)) {
    throw std::invalid_argument("poincare_low: amplitude must lie in (0, pi)");
  }
  const double eps = p.epsilon();
  // cos x' - cos x - eps (x + x') is strictly decreasing in x' on (0, x).
  auto g = [=](double xp) {
    return 2.0 * std::sin(0.5 * (x - xp)) * std::sin(0.5 * (x + xp)) - eps * (x + xp);
  };
  const double g0 = g(0.0);
  if (!(g0 > 0.0)) return std::nullopt;
  std::uintmax_t iters = 200;
  auto tol = [](double a, double b) { return std::abs(b - a) <= 1e-15; };
  auto [lo, hi] = boost::math::tools::toms748_solve(g, 0.0, x, g0, -2.0 * eps * x, tol, iters);
  double root = 0.5 * (lo + hi);
  if (!(root > 0.0 && root < x)) return std::nullopt;
  return root;
}

PoincareIterates iterate_poincare_low(double x0, const Params& p, bool with_times,
                                      std::size_t max_steps) {
  if (!(x0 > 0.0 && x0 < kPi)) {
    throw std::invalid_argument("iterate_poincare_low: amplitude must lie in (0, pi)");
  }
  PoincareIterates out;
  out.zone = EnergyZone::Low;
  double x = x0;
  auto push = [&](double a) {
    double s = std::sin(0.5 * a);
    double E = 2.0 * s * s;
    out.section.push_back(a);
    out.energies.push_back(E);
    out.reduced.push_back(2.0 - E);
  };
  push(x);
  for (std::size_t n = 0; n < max_steps; ++n) {
    auto next = poincare_low(x, p);
    if (!next) {
      out.exhausted = true;
      break;
    }
    if (with_times) out.step_times.push_back(half_swing_time(x, *next, p.epsilon()));
    x = *next;
    push(x);
  }
  return out;
}

PoincareIterates iterate_poincare_high(double y0, const Params& p, bool with_times,
                                       std::size_t max_steps) {
  if (!(y0 != 0.0) || !std::isfinite(y0)) {
    throw std::invalid_argument("iterate_poincare_high: speed must be nonzero");
  }
  PoincareIterates out;
  out.zone = EnergyZone::High;
  const double drop = 4.0 * kPi * p.epsilon();
  double y = y0;
  auto push = [&](double v) {
    out.section.push_back(v);
    out.energies.push_back(2.0 + 0.5 * v * v);
    out.reduced.push_back(0.5 * v * v);
  };
  push(y);
  for (std::size_t n = 0; n < max_steps; ++n) {
    if (!(y * y > drop)) {
      out.exhausted = true;
      break;
    }
    if (with_times) out.step_times.push_back(full_turn_time(std::abs(y), p.epsilon()));
    y = poincare_high(y, p);
    push(y);
  }
  return out;
}

LimitPath limit_ode_solve(LimitZone zone, double init, const std::vector<ControlPiece>& profile,
                          double step) {
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw std::invalid_argument("limit_ode_solve: step must be positive");
  }
  if (zone == LimitZone::Low && !(init > 0.0 && init <= kPi)) {
    throw std::invalid_argument("limit_ode_solve: low-zone amplitude must lie in (0, pi]");
  }
  if (zone == LimitZone::High && (!(init > 0.0) || !std::isfinite(init))) {
    throw std::invalid_argument("limit_ode_solve: high-zone speed must be positive");
  }
  for (const auto& piece : profile) {
    if (!(std::abs(piece.u) <= 1.0)) {
      throw std::invalid_argument("limit_ode_solve: control value outside [-1, 1]");
    }
    if (!(piece.duration >= 0.0)) {
      throw std::invalid_argument("limit_ode_solve: negative piece duration");
    }
  }

  // Work in the variable that moves linearly in time: G(X) for the low zone
  // (dG/dt = U) and Y^2 for the high zone (dY^2/dt = 4 pi U).
  const bool low = zone == LimitZone::Low;
  const double rate_scale = low ? 1.0 : 4.0 * kPi;
  const double ceiling = low ? half_sine_integral(kPi) : std::numeric_limits<double>::infinity();
  auto to_value = [&](double q) {
    if (q <= 0.0) return 0.0;
    return low ? inverse_half_sine_integral(std::min(q, ceiling)) : std::sqrt(q);
  };

  LimitPath path;
  path.zone = zone;
  double q = low ? half_sine_integral(init) : init * init;
  double t = 0.0;
  path.t.push_back(t);
  path.value.push_back(init);

  for (const auto& piece : profile) {
    const double rate = rate_scale * piece.u;
    double span = piece.duration;
    bool hits = false;
    if (rate < 0.0 && q / -rate <= span) {
      span = q / -rate;
      hits = true;
    }
    if (rate > 0.0 && std::isfinite(ceiling) && q + rate * span > ceiling * (1.0 + 1e-14)) {
      throw std::domain_error("limit_ode_solve: control drives X above pi");
    }
    if (!std::isfinite(span)) {
      throw std::invalid_argument("limit_ode_solve: unbounded piece never reaches the target");
    }
    const double t_start = t;
    const double q_start = q;
    const auto count = static_cast<std::size_t>(std::floor(span / step));
    for (std::size_t k = 1; k <= count; ++k) {
      double dt = k * step;
      if (dt >= span) break;
      path.control.push_back(piece.u);
      path.t.push_back(t_start + dt);
      path.value.push_back(to_value(q_start + rate * dt));
    }
    if (span > 0.0) {
      path.control.push_back(piece.u);
      t = t_start + span;
      q = hits ? 0.0 : q_start + rate * span;
      path.t.push_back(t);
      path.value.push_back(to_value(q));
    }
    if (hits) {
      path.reached_target = true;
      break;
    }
  }
  path.control.push_back(path.control.empty() ? 0.0 : path.control.back());
  path.total_time = t;
  return path;
}

QuadratureResult cost_functional(const LimitPath& path, double tol) {
  check_tol(tol);
  if (path.t.size() != path.value.size() || path.control.size() != path.t.size()) {
    throw std::invalid_argument("cost_functional: inconsistent path arrays");
  }
  QuadratureResult total;
  if (path.t.size() < 2) return total;
  const bool low = path.zone == LimitZone::Low;
  const double inner = nested_tol(tol);

  // Per-oscillation time as a function of the path variable.
  InnerStats stats;
  auto per_oscillation = [&](double v) {
    if (low) {
      double kc = std::cos(0.5 * v);
      if (!(kc > 0.0)) return 0.0;
      return kSqrt2 * stats.take(quarter_period(std::min(kc, 1.0), inner));
    }
    double h = 0.5 * v * v;
    if (!(h > 0.0)) return 0.0;
    return stats.take(turn_integral(h, inner));
  };

  std::size_t i = 0;
  const std::size_t last = path.t.size() - 1;
  while (i < last) {
    std::size_t j = i + 1;
    while (j < last && path.control[j] == path.control[i]) ++j;
    const double u = path.control[i];
    const double a = path.value[i];
    const double b = path.value[j];
    QuadratureResult piece;
    if (u == 0.0) {
      piece.value = per_oscillation(a) * (path.t[j] - path.t[i]);
    } else if (low) {
      // dt = sin X/(2 X |U|) dX
      auto f = [&](double x) { return per_oscillation(x) * sinc_half(x) / std::abs(u); };
      piece = tanh_sinh(f, std::min(a, b), std::max(a, b), 0.5 * tol);
    } else {
      // dt = Y dY / (2 pi |U|) = dh / (2 pi |U|) with h = Y^2/2
      auto f = [&](double h) {
        double y = std::sqrt(2.0 * h);
        return per_oscillation(y) / (2.0 * kPi * std::abs(u));
      };
      double ha = 0.5 * a * a, hb = 0.5 * b * b;
      piece = tanh_sinh(f, std::min(ha, hb), std::max(ha, hb), 0.5 * tol);
    }
    total.value += piece.value;
    total.error_estimate += piece.error_estimate;
    total.evaluations += piece.evaluations;
    total.converged = total.converged && piece.converged;
    i = j;
  }
  total.evaluations += stats.evaluations;
  total.error_estimate += stats.worst_relative_error * std::abs(total.value);
  total.converged = total.converged && stats.converged &&
                    total.error_estimate <= tol * std::max(1.0, std::abs(total.value));
  return total;
}

std::vector<EulerRow> euler_convergence(double x0, const std::vector<double>& eps_list) {
  if (!(x0 > 0.0 && x0 < kPi)) {
    throw std::invalid_argument("euler_convergence: x0 must lie in (0, pi)");
  }
  if (eps_list.empty()) throw std::invalid_argument("euler_convergence: empty epsilon list");
  for (std::size_t k = 0; k < eps_list.size(); ++k) {
    if (!(eps_list[k] > 0.0) || (k > 0 && !(eps_list[k] < eps_list[k - 1]))) {
      throw std::invalid_argument("euler_convergence: epsilons must be positive and decreasing");
    }
  }
  const double g0 = half_sine_integral(x0);
  auto limit_at = [g0](double t) { return t < g0 ? inverse_half_sine_integral(g0 - t) : 0.0; };

  std::vector<EulerRow> rows;
  for (double eps : eps_list) {
    auto it = iterate_poincare_low(x0, Params(eps), false);
    std::vector<double> nodes = it.section;
    nodes.push_back(0.0);  // the capturing swing ends at rest
    const std::size_t n_nodes = nodes.size();

    double sup = 0.0;
    constexpr int kSub = 8;
    for (std::size_t n = 0; n + 1 < n_nodes; ++n) {
      for (int k = 0; k < kSub; ++k) {
        double frac = static_cast<double>(k) / kSub;
        double t = (n + frac) * eps;
        double broken = nodes[n] + frac * (nodes[n + 1] - nodes[n]);
        sup = std::max(sup, std::abs(broken - limit_at(t)));
      }
    }
    // Past the last node the broken line rests at 0 while the limit may not.
    const double t_end = (n_nodes - 1) * eps;
    sup = std::max(sup, limit_at(t_end));

    EulerRow row;
    row.epsilon = eps;
    row.steps = it.section.size() - 1;
    row.sup_error = sup;
    row.ratio = rows.empty() ? kNaN : sup / rows.back().sup_error;
    rows.push_back(row);
  }
  return rows;
}

}  // namespace pendamp
