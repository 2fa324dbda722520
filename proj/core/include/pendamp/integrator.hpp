#pragma once

// Adaptive Dormand-Prince 5(4) integration with event localization.
//
// Events are scalar functions g(t, state). A crossing is detected by a strict
// sign change of g across an accepted step and refined by re-stepping from the
// start of that step with a shortened step size, so the localized state carries
// the integrator's own accuracy rather than the interpolant's. Direction
// filters refer to the integration direction: Rising means g increases as the
// integration proceeds, also for backward runs.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace pendamp {

template <std::size_t N>
using Vec = std::array<double, N>;

template <std::size_t N>
using Rhs = std::function<Vec<N>(double, const Vec<N>&)>;

enum class EventDirection { Rising, Falling, Any };

template <std::size_t N>
struct EventSpec {
  std::function<double(double, const Vec<N>&)> function;
  EventDirection direction = EventDirection::Any;
  bool terminal = false;
  std::string label;
};

template <std::size_t N>
struct EventRecord {
  double t = 0.0;
  Vec<N> state{};
  std::string label;
  std::size_t spec_index = 0;
};

template <std::size_t N>
struct Sample {
  double t = 0.0;
  Vec<N> state{};
};

enum class StopReason { TerminalEvent, TimeLimit, StepFailure };

inline const char* to_string(StopReason r) {
  switch (r) {
    case StopReason::TerminalEvent:
      return "terminal_event";
    case StopReason::TimeLimit:
      return "time_limit";
    case StopReason::StepFailure:
      break;
  }
  return "step_failure";
}

struct StepControl {
  double rel_tol = 1e-10;
  double abs_tol = 1e-12;
  double event_tol = 1e-11;
  double max_step = 0.1;
  double min_step = 1e-12;
  // 0 records accepted steps only; > 0 adds dense-output samples at this spacing.
  double sample_interval = 0.0;
  bool record_samples = true;

  void validate() const {
    if (!(rel_tol > 0.0) || !(abs_tol > 0.0) || !(event_tol > 0.0)) {
      throw std::invalid_argument("StepControl: tolerances must be positive");
    }
    if (!(min_step > 0.0) || !(min_step < max_step)) {
      throw std::invalid_argument("StepControl: need 0 < min_step < max_step");
    }
    if (sample_interval < 0.0) {
      throw std::invalid_argument("StepControl: sample_interval must be >= 0");
    }
  }
};

template <std::size_t N>
struct TrajectorySegment {
  std::vector<Sample<N>> samples;
  std::vector<EventRecord<N>> events;
  StopReason stop_reason = StopReason::TimeLimit;
  std::string diagnostic;
  std::size_t rhs_evaluations = 0;
  std::size_t accepted_steps = 0;
  std::size_t rejected_steps = 0;

  double start_time() const { return samples.front().t; }
  double end_time() const { return samples.back().t; }
  const Vec<N>& final_state() const { return samples.back().state; }
  // Terminal event that stopped the run, if any.
  const EventRecord<N>* terminal_event() const {
    if (stop_reason != StopReason::TerminalEvent || events.empty()) return nullptr;
    return &events.back();
  }
};

namespace detail {

// Dormand-Prince 5(4) tableau.
struct DoPri5 {
  static constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
  static constexpr double a21 = 1.0 / 5;
  static constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  static constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  static constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                          a54 = -212.0 / 729;
  static constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                          a64 = 49.0 / 176, a65 = -5103.0 / 18656;
  static constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192,
                          a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  static constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                          e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;
  // Continuous extension (Hairer, Norsett, Wanner).
  static constexpr double d1 = -12715105075.0 / 11282082432, d3 = 87487479700.0 / 32700410799,
                          d4 = -10690763975.0 / 1880347072, d5 = 701980252875.0 / 199316789632,
                          d6 = -1453857185.0 / 822651844, d7 = 69997945.0 / 29380423;
};

template <std::size_t N>
struct StepResult {
  Vec<N> y1{};
  Vec<N> k7{};  // derivative at the step end (FSAL)
  Vec<N> err{};
  std::array<Vec<N>, 7> k{};
};

template <std::size_t N>
StepResult<N> dopri_step(const Rhs<N>& f, double t, const Vec<N>& y, const Vec<N>& k1, double h,
                         std::size_t& evals) {
  using T = DoPri5;
  StepResult<N> r;
  auto& k = r.k;
  k[0] = k1;
  Vec<N> tmp;
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * T::a21 * k[0][i];
  k[1] = f(t + T::c2 * h, tmp);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (T::a31 * k[0][i] + T::a32 * k[1][i]);
  k[2] = f(t + T::c3 * h, tmp);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (T::a41 * k[0][i] + T::a42 * k[1][i] + T::a43 * k[2][i]);
  k[3] = f(t + T::c4 * h, tmp);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (T::a51 * k[0][i] + T::a52 * k[1][i] + T::a53 * k[2][i] +
                         T::a54 * k[3][i]);
  k[4] = f(t + T::c5 * h, tmp);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (T::a61 * k[0][i] + T::a62 * k[1][i] + T::a63 * k[2][i] +
                         T::a64 * k[3][i] + T::a65 * k[4][i]);
  k[5] = f(t + h, tmp);
  for (std::size_t i = 0; i < N; ++i)
    r.y1[i] = y[i] + h * (T::a71 * k[0][i] + T::a73 * k[2][i] + T::a74 * k[3][i] +
                          T::a75 * k[4][i] + T::a76 * k[5][i]);
  k[6] = f(t + h, r.y1);
  r.k7 = k[6];
  for (std::size_t i = 0; i < N; ++i)
    r.err[i] = h * (T::e1 * k[0][i] + T::e3 * k[2][i] + T::e4 * k[3][i] + T::e5 * k[4][i] +
                    T::e6 * k[5][i] + T::e7 * k[6][i]);
  evals += 6;
  return r;
}

// Fourth-order dense output on [t, t + h], theta in [0, 1].
template <std::size_t N>
Vec<N> dopri_dense(const Vec<N>& y0, const StepResult<N>& s, double h, double theta) {
  using T = DoPri5;
  Vec<N> out;
  const auto& k = s.k;
  for (std::size_t i = 0; i < N; ++i) {
    const double r1 = y0[i];
    const double r2 = s.y1[i] - y0[i];
    const double r3 = h * k[0][i] - r2;
    const double r4 = r2 - h * k[6][i] - r3;
    const double r5 = h * (T::d1 * k[0][i] + T::d3 * k[2][i] + T::d4 * k[3][i] +
                           T::d5 * k[4][i] + T::d6 * k[5][i] + T::d7 * k[6][i]);
    out[i] = r1 + theta * (r2 + (1.0 - theta) * (r3 + theta * (r4 + (1.0 - theta) * r5)));
  }
  return out;
}

inline int sign_of(double v) { return (v > 0.0) - (v < 0.0); }

inline bool direction_matches(EventDirection d, int from_sign, int to_sign) {
  switch (d) {
    case EventDirection::Rising:
      return from_sign < 0 && to_sign > 0;
    case EventDirection::Falling:
      return from_sign > 0 && to_sign < 0;
    case EventDirection::Any:
      break;
  }
  return from_sign != to_sign;
}

}  // namespace detail

/// Integrates state' = rhs(t, state) from t0 toward t_limit (either direction).
///
/// Stops at the first terminal event, at t_limit, or when the step size would
/// fall below ctl.min_step (StopReason::StepFailure with a diagnostic). Events
/// whose function is within event_tol of zero at t0 are not armed until the
/// end of the first accepted step, so restarting from an event state does not
/// re-trigger it.
template <std::size_t N>
TrajectorySegment<N> integrate(const Rhs<N>& rhs, const Vec<N>& s0, double t0, double t_limit,
                               const std::vector<EventSpec<N>>& events,
                               const StepControl& ctl = {}) {
  ctl.validate();
  if (t_limit == t0) {
    throw std::invalid_argument("integrate: t_limit must differ from t0");
  }
  const double dir = t_limit > t0 ? 1.0 : -1.0;
  TrajectorySegment<N> seg;
  seg.samples.push_back({t0, s0});

  std::vector<int> ref_sign(events.size(), 0);
  std::vector<bool> armed(events.size(), true);
  for (std::size_t e = 0; e < events.size(); ++e) {
    const double g0 = events[e].function(t0, s0);
    if (std::abs(g0) <= ctl.event_tol) {
      armed[e] = false;
    } else {
      ref_sign[e] = detail::sign_of(g0);
    }
  }

  double t = t0;
  Vec<N> y = s0;
  Vec<N> k1 = rhs(t, y);
  seg.rhs_evaluations = 1;

  auto error_norm = [&](const Vec<N>& a, const Vec<N>& b, const Vec<N>& err) {
    double acc = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = ctl.abs_tol + ctl.rel_tol * std::max(std::abs(a[i]), std::abs(b[i]));
      const double q = err[i] / sc;
      acc += q * q;
    }
    return std::sqrt(acc / static_cast<double>(N));
  };

  // Initial step guess (Hairer's heuristic, simplified).
  double h;
  {
    double d0 = 0.0, d1 = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc = ctl.abs_tol + ctl.rel_tol * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1 += (k1[i] / sc) * (k1[i] / sc);
    }
    d0 = std::sqrt(d0 / N);
    d1 = std::sqrt(d1 / N);
    h = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
    h = std::clamp(h, ctl.min_step * 10.0, ctl.max_step);
  }

  double next_sample = t0 + dir * ctl.sample_interval;
  constexpr double kSafety = 0.9;
  constexpr int kMaxRefine = 200;

  while (dir * (t_limit - t) > 0.0) {
    double step = std::min(h, std::abs(t_limit - t));
    const bool last = step >= std::abs(t_limit - t);
    detail::StepResult<N> res;
    double err = 0.0;
    for (;;) {
      res = detail::dopri_step<N>(rhs, t, y, k1, dir * step, seg.rhs_evaluations);
      err = error_norm(y, res.y1, res.err);
      bool finite = std::isfinite(err);
      for (double v : res.y1) finite = finite && std::isfinite(v);
      if (finite && err <= 1.0) break;
      ++seg.rejected_steps;
      const double fac = finite ? std::max(0.2, kSafety * std::pow(err, -0.2)) : 0.25;
      step *= fac;
      if (step < ctl.min_step) {
        seg.stop_reason = StopReason::StepFailure;
        seg.diagnostic = "step size fell below min_step at t=" + std::to_string(t);
        return seg;
      }
    }
    ++seg.accepted_steps;
    const double h_signed = dir * step;
    const double t_new = (last && step == std::abs(t_limit - t)) ? t_limit : t + h_signed;

    // Event scan over this step.
    struct Hit {
      double t;
      Vec<N> state;
      std::size_t index;
    };
    std::vector<Hit> hits;
    std::vector<int> new_sign(events.size(), 0);
    for (std::size_t e = 0; e < events.size(); ++e) {
      const double g1 = events[e].function(t_new, res.y1);
      new_sign[e] = detail::sign_of(g1);
      if (!armed[e] || ref_sign[e] == 0 || new_sign[e] == 0 || new_sign[e] == ref_sign[e]) {
        continue;
      }
      if (!detail::direction_matches(events[e].direction, ref_sign[e], new_sign[e])) continue;
      // Bracketed refinement on the shortened-step map s -> g(t + s, y(t + s)).
      auto eval_at = [&](double s, Vec<N>& state) {
        if (s == 0.0) {
          state = y;
          return events[e].function(t, y);
        }
        if (s == h_signed) {
          state = res.y1;
          return g1;
        }
        std::size_t dummy = 0;
        auto part = detail::dopri_step<N>(rhs, t, y, k1, s, dummy);
        seg.rhs_evaluations += dummy;
        state = part.y1;
        return events[e].function(t + s, state);
      };
      double a = 0.0, b = h_signed;
      Vec<N> sa, sb;
      double ga = eval_at(a, sa), gb = g1;
      sb = res.y1;
      if (detail::sign_of(ga) == detail::sign_of(gb)) {
        // Sign reference came from an earlier step but g(t) already moved; use
        // the dense interpolant to find a bracket inside the step.
        bool found = false;
        for (int j = 1; j < 16 && !found; ++j) {
          const double th = j / 16.0;
          const Vec<N> st = detail::dopri_dense<N>(y, res, h_signed, th);
          const double gv = events[e].function(t + th * h_signed, st);
          if (detail::sign_of(gv) == ref_sign[e]) {
            a = th * h_signed;
            ga = eval_at(a, sa);
            found = detail::sign_of(ga) != detail::sign_of(gb);
          }
        }
        if (!found) continue;
      }
      // Illinois false position.
      int side = 0;
      double s_best = b;
      Vec<N> st_best = sb;
      double g_best = gb;
      for (int it = 0; it < kMaxRefine; ++it) {
        double s = (a * gb - b * ga) / (gb - ga);
        if (!(std::min(a, b) < s && s < std::max(a, b))) s = 0.5 * (a + b);
        Vec<N> st;
        const double gs = eval_at(s, st);
        s_best = s;
        st_best = st;
        g_best = gs;
        if (std::abs(gs) <= ctl.event_tol || std::abs(b - a) <= 4.0 * std::numeric_limits<double>::epsilon() * (std::abs(t) + 1.0)) {
          break;
        }
        if (detail::sign_of(gs) == detail::sign_of(gb)) {
          b = s;
          gb = gs;
          if (side == -1) ga *= 0.5;
          side = -1;
        } else {
          a = s;
          ga = gs;
          if (side == 1) gb *= 0.5;
          side = 1;
        }
      }
      (void)g_best;
      hits.push_back({t + s_best, st_best, e});
    }

    std::sort(hits.begin(), hits.end(),
              [dir](const Hit& l, const Hit& r) { return dir * l.t < dir * r.t; });
    const Hit* terminal = nullptr;
    for (const auto& hit : hits) {
      if (events[hit.index].terminal) {
        terminal = &hit;
        break;
      }
    }

    auto emit_dense_samples = [&](double t_end) {
      if (!ctl.record_samples || ctl.sample_interval <= 0.0) return;
      while (dir * (t_end - next_sample) > 0.0) {
        const double th = (next_sample - t) / h_signed;
        seg.samples.push_back({next_sample, detail::dopri_dense<N>(y, res, h_signed, th)});
        next_sample += dir * ctl.sample_interval;
      }
    };

    if (terminal != nullptr) {
      for (const auto& hit : hits) {
        if (dir * hit.t > dir * terminal->t) break;
        if (&hit != terminal && events[hit.index].terminal) continue;
        seg.events.push_back({hit.t, hit.state, events[hit.index].label, hit.index});
      }
      // Keep the terminal record last.
      std::stable_partition(seg.events.begin(), seg.events.end(), [&](const EventRecord<N>& r) {
        return !(r.t == terminal->t && r.spec_index == terminal->index);
      });
      emit_dense_samples(terminal->t);
      seg.samples.push_back({terminal->t, terminal->state});
      seg.stop_reason = StopReason::TerminalEvent;
      return seg;
    }
    for (const auto& hit : hits) {
      seg.events.push_back({hit.t, hit.state, events[hit.index].label, hit.index});
    }
    for (std::size_t e = 0; e < events.size(); ++e) {
      if (!armed[e]) {
        armed[e] = true;
        ref_sign[e] = new_sign[e];
      } else if (new_sign[e] != 0) {
        ref_sign[e] = new_sign[e];
      }
    }

    emit_dense_samples(t_new);
    t = t_new;
    y = res.y1;
    k1 = res.k7;
    if (ctl.record_samples) seg.samples.push_back({t, y});
    const double fac = err == 0.0 ? 5.0 : std::clamp(kSafety * std::pow(err, -0.2), 0.2, 5.0);
    h = std::min(step * fac, ctl.max_step);
  }
  if (!ctl.record_samples) seg.samples.push_back({t, y});
  seg.stop_reason = StopReason::TimeLimit;
  return seg;
}

}  // namespace pendamp
