#include "pendamp/quasiopt.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <stdexcept>
#include <thread>

namespace pendamp {

int dry_friction_control(const PhaseState& s, const Params& p) {
  if (s.y == 0.0) {
    throw std::domain_error("dry_friction_control: undefined at y = 0");
  }
  if (2.0 * p.epsilon() < 1.0 && standstill_zone(s, p) != ZoneTag::None) {
    throw std::domain_error("dry_friction_control: state inside the standstill zone");
  }
  return s.y > 0.0 ? -1 : 1;
}

const char* to_string(Mode m) {
  switch (m) {
    case Mode::Coast:
      return "coast";
    case Mode::Maneuver:
      return "upper_zone_maneuver";
    case Mode::Capture:
      return "terminal_capture";
    case Mode::DryFriction:
      break;
  }
  return "dry_friction";
}

const char* to_string(DampingStatus s) {
  switch (s) {
    case DampingStatus::BudgetExceeded:
      return "budget_exceeded";
    case DampingStatus::StepFailure:
      return "step_failure";
    case DampingStatus::Captured:
      break;
  }
  return "captured";
}

namespace {

enum class Next { Classify, Upper, Capture };

}  // namespace

DampingResult simulate_damping(const PhaseState& p0, const Params& p, const CapturePolicy& policy) {
  const double eps = p.epsilon();
  const double fe = policy.zone_factor * eps;
  if (!(policy.zone_factor > 0.0) || !(fe < 1.0)) {
    throw std::invalid_argument("simulate_damping: need 0 < zone_factor * eps < 1");
  }
  if (!(policy.capture_k > 0.0)) {
    throw std::invalid_argument("simulate_damping: capture_k must be positive");
  }
  if (!std::isfinite(p0.x) || !std::isfinite(p0.y)) {
    throw std::invalid_argument("simulate_damping: initial state must be finite");
  }
  const double cap_energy = policy.capture_k * eps * eps;
  const double budget = policy.time_budget > 0.0 ? policy.time_budget : 64.0 / eps;
  const double coast_budget =
      policy.coast_budget > 0.0 ? policy.coast_budget : 4.0 * std::log(1.0 / eps) + 16.0;

  StepControl ctl = policy.step;
  ctl.record_samples = policy.record_samples;

  DampingResult res;
  auto& traj = res.trajectory;
  traj.samples.push_back({0.0, {p0.x, p0.y}});

  double u = 0.0;
  Rhs<2> rhs = [&u, eps](double, const Vec<2>& q) {
    return Vec<2>{q[1], -std::sin(q[0]) + eps * u};
  };
  auto E_of = [](const Vec<2>& q) { return 0.5 * q[1] * q[1] + 1.0 - std::cos(q[0]); };
  auto upper_g = [fe](double, const Vec<2>& q) {
    return std::max({std::abs(std::sin(q[0])) - fe, std::abs(q[1]) - fe, std::cos(q[0])});
  };
  auto capture_g = [fe, cap_energy, E_of](double, const Vec<2>& q) {
    return std::max({std::abs(std::sin(q[0])) - fe, std::abs(q[1]) - fe, E_of(q) - cap_energy,
                     -std::cos(q[0])});
  };
  EventSpec<2> turn_ev{[](double, const Vec<2>& q) { return q[1]; }, EventDirection::Any, true, "turn"};
  EventSpec<2> capture_ev{capture_g, EventDirection::Falling, true, "capture"};
  EventSpec<2> upper_ev{upper_g, EventDirection::Falling, true, "upper_zone"};
  EventSpec<2> section_ev{[](double, const Vec<2>& q) { return std::cos(0.5 * q[0]); },
                          EventDirection::Any, false, "section"};
  EventSpec<2> bottom_ev{[](double, const Vec<2>& q) { return std::sin(0.5 * q[0]); },
                         EventDirection::Any, true, "bottom"};
  EventSpec<2> top_ev{[](double, const Vec<2>& q) { return std::cos(0.5 * q[0]); },
                      EventDirection::Any, true, "top"};
  EventSpec<2> leave_ev{upper_g, EventDirection::Rising, true, "leave_upper"};

  Vec<2> z{p0.x, p0.y};
  double t = 0.0;

  // Runs one arc with constant u and appends it to the result.
  auto run_arc = [&](Mode mode, double control, const std::vector<EventSpec<2>>& events,
                     double span) {
    u = control;
    auto seg = integrate<2>(rhs, z, t, t + span, events, ctl);
    traj.rhs_evaluations += seg.rhs_evaluations;
    traj.accepted_steps += seg.accepted_steps;
    traj.rejected_steps += seg.rejected_steps;
    for (std::size_t i = 1; i < seg.samples.size(); ++i) traj.samples.push_back(seg.samples[i]);
    for (const auto& ev : seg.events) traj.events.push_back(ev);
    PhaseEntry entry;
    entry.mode = mode;
    entry.t_start = t;
    entry.start = {z[0], z[1]};
    entry.control = static_cast<int>(control);
    z = seg.final_state();
    t = seg.end_time();
    entry.t_end = t;
    entry.end = {z[0], z[1]};
    res.phase_log.push_back(entry);
    return seg;
  };

  auto in_capture = [&](const Vec<2>& q) { return capture_g(0.0, q) < 0.0; };

  Next next = Next::Classify;
  bool at_section = false;  // high-energy descent starts from the x = pi section
  for (;;) {
    if (next == Next::Capture || in_capture(z)) {
      res.status = DampingStatus::Captured;
      PhaseEntry entry;
      entry.mode = Mode::Capture;
      entry.t_start = entry.t_end = t;
      entry.start = entry.end = {z[0], z[1]};
      res.phase_log.push_back(entry);
      break;
    }
    const double remaining = budget - t;
    if (!(remaining > 0.0)) {
      res.status = DampingStatus::BudgetExceeded;
      res.diagnostic = "time budget " + std::to_string(budget) + " exhausted";
      break;
    }
    const PhaseState s{z[0], z[1]};
    if (next == Next::Upper || standstill_zone(s, p, policy.zone_factor) == ZoneTag::Upper) {
      // Switch the control off and wait until the pendulum passes the bottom.
      auto seg = run_arc(Mode::Coast, 0.0, {bottom_ev}, std::min(coast_budget, remaining));
      if (seg.stop_reason == StopReason::StepFailure) {
        res.status = DampingStatus::StepFailure;
        res.diagnostic = seg.diagnostic;
        break;
      }
      next = Next::Classify;
      if (seg.terminal_event() != nullptr || coast_budget >= remaining) continue;
      // Stalled near the saddle: push away from the top for one arc.
      const double push = std::sin(z[0]) >= 0.0 ? -1.0 : 1.0;
      ++res.maneuvers;
      auto man = run_arc(Mode::Maneuver, push, {leave_ev},
                         std::min(coast_budget, budget - t));
      if (man.stop_reason == StopReason::StepFailure) {
        res.status = DampingStatus::StepFailure;
        res.diagnostic = man.diagnostic;
        break;
      }
      continue;
    }
    if (E_of(z) > 2.0 && !at_section) {
      at_section = true;
      if (std::abs(std::cos(0.5 * z[0])) > ctl.event_tol) {
        auto seg = run_arc(Mode::Coast, 0.0, {top_ev, upper_ev}, std::min(coast_budget, remaining));
        if (seg.stop_reason == StopReason::StepFailure) {
          res.status = DampingStatus::StepFailure;
          res.diagnostic = seg.diagnostic;
          break;
        }
        const auto* te = seg.terminal_event();
        if (te != nullptr && te->label == "upper_zone") next = Next::Upper;
        continue;
      }
    }

    // Dry friction until the next turn, capture, or upper-zone entry.
    const double control = z[1] != 0.0 ? (z[1] > 0.0 ? -1.0 : 1.0)
                                       : (std::sin(z[0]) > 0.0 ? 1.0 : -1.0);
    auto seg = run_arc(Mode::DryFriction, control, {turn_ev, capture_ev, upper_ev, section_ev},
                       remaining);
    for (const auto& ev : seg.events) {
      if (ev.label == "section") res.crossings.push_back({ev.t, ev.state[0], ev.state[1]});
    }
    if (seg.stop_reason == StopReason::StepFailure) {
      res.status = DampingStatus::StepFailure;
      res.diagnostic = seg.diagnostic;
      break;
    }
    const auto* te = seg.terminal_event();
    if (te == nullptr) continue;  // budget; reported at the top of the loop
    if (te->label == "turn") {
      res.turns.push_back({te->t, te->state[0], te->state[1]});
      z[1] = 0.0;
      if (standstill_zone({z[0], 0.0}, p, policy.zone_factor) == ZoneTag::None) ++res.switch_count;
    } else if (te->label == "capture") {
      next = Next::Capture;
    } else if (te->label == "upper_zone") {
      next = Next::Upper;
    }
  }

  res.damping_time = t;
  res.terminal_state = {z[0], z[1]};
  traj.stop_reason = res.status == DampingStatus::StepFailure ? StopReason::StepFailure
                     : res.status == DampingStatus::Captured  ? StopReason::TerminalEvent
                                                              : StopReason::TimeLimit;
  traj.diagnostic = res.diagnostic;
  return res;
}

LinearFit fit_linear(const std::vector<double>& eps, const std::vector<double>& values) {
  if (eps.size() != values.size() || eps.size() < 2) {
    throw std::invalid_argument("fit_linear: need at least two matching points");
  }
  const double n = static_cast<double>(eps.size());
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < eps.size(); ++i) {
    sx += eps[i];
    sy += values[i];
    sxx += eps[i] * eps[i];
    sxy += eps[i] * values[i];
  }
  const double det = n * sxx - sx * sx;
  if (det == 0.0) throw std::invalid_argument("fit_linear: degenerate abscissae");
  LinearFit fit;
  fit.b = (n * sxy - sx * sy) / det;
  fit.a = (sy - fit.b * sx) / n;
  return fit;
}

ScalingTable sweep_scaling(const PhaseState& p0, const std::vector<double>& eps_list,
                           const CapturePolicy& policy, unsigned threads) {
  if (eps_list.size() < 2) throw std::invalid_argument("sweep_scaling: need at least two epsilons");
  for (std::size_t i = 1; i < eps_list.size(); ++i) {
    if (!(eps_list[i] < eps_list[i - 1])) {
      throw std::invalid_argument("sweep_scaling: epsilons must be sorted decreasing");
    }
  }
  ScalingTable table;
  table.p0 = p0;
  table.runs.resize(eps_list.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, eps_list.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < eps_list.size(); ++i) {
      table.runs[i] = simulate_damping(p0, Params(eps_list[i]), policy);
    }
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < eps_list.size(); i = next++) {
          table.runs[i] = simulate_damping(p0, Params(eps_list[i]), policy);
        }
      });
    }
    for (auto& th : pool) th.join();
  }

  std::vector<double> xs, eT, eN;
  for (std::size_t i = 0; i < eps_list.size(); ++i) {
    const auto& run = table.runs[i];
    ScalingRow row;
    row.epsilon = eps_list[i];
    row.T = run.damping_time;
    row.N = run.switch_count;
    row.eps_T = row.epsilon * row.T;
    row.eps_N = row.epsilon * row.N;
    row.status = run.status;
    table.rows.push_back(row);
    if (run.status == DampingStatus::Captured) {
      xs.push_back(row.epsilon);
      eT.push_back(row.eps_T);
      eN.push_back(row.eps_N);
    }
  }
  if (xs.size() >= 2) {
    table.eps_T_fit = fit_linear(xs, eT);
    table.eps_N_fit = fit_linear(xs, eN);
  }
  return table;
}

}  // namespace pendamp
