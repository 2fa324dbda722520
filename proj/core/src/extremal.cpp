#include "pendamp/extremal.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>
#include <utility>

namespace pendamp {

namespace {

enum EventIndex : std::size_t {
  kSwitch = 0,
  kTurn,
  kEnergy,
  kSpeed,
  kUpperEntry,
  kLowerEntry,
  kLowerExit,
};

Vec<4> to_physical(const Vec<4>& q, double eps) { return {q[0], q[1], q[2] / eps, q[3] / eps}; }

ExtremalState as_state(const Vec<4>& q) { return {q[0], q[1], q[2], q[3]}; }

// Runs jobs[i] -> out[i] on up to `threads` workers.
template <typename Job, typename Result, typename Fn>
void run_parallel(const std::vector<Job>& jobs, std::vector<Result>& out, unsigned threads, Fn fn) {
  out.resize(jobs.size());
  const unsigned workers = std::max(1u, std::min<unsigned>(threads, jobs.size()));
  if (workers == 1) {
    for (std::size_t i = 0; i < jobs.size(); ++i) out[i] = fn(jobs[i]);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < jobs.size(); i = next++) out[i] = fn(jobs[i]);
    });
  }
  for (auto& th : pool) th.join();
}

}  // namespace

ExtremalState canonical_field(const ExtremalState& e, const Params& p) {
  if (e.psi == 0.0) {
    throw std::domain_error("canonical_field: control undefined at psi = 0");
  }
  const double u = e.psi > 0.0 ? 1.0 : -1.0;
  return {e.y, -std::sin(e.x) + p.epsilon() * u, std::cos(e.x) * e.psi, -e.phi};
}

ExtremalState terminal_costate(double phi_T, int s, const Params& p) {
  if (s != 1 && s != -1) throw std::invalid_argument("terminal_costate: sign must be +1 or -1");
  return {0.0, 0.0, phi_T, s / p.epsilon()};
}

double hamiltonian_residual(const ExtremalState& e, const Params& p) {
  return e.y * e.phi - std::sin(e.x) * e.psi + p.epsilon() * std::abs(e.psi) - 1.0;
}

const char* to_string(ExtremalStop r) {
  switch (r) {
    case ExtremalStop::EnergyExit:
      return "energy_exit";
    case ExtremalStop::StandstillEntry:
      return "standstill_entry";
    case ExtremalStop::StepFailure:
      return "step_failure";
    case ExtremalStop::TimeBudget:
      break;
  }
  return "time_budget";
}

const char* to_string(BifurcationStatus s) {
  return s == BifurcationStatus::Ok ? "ok" : "bracket_violation";
}

ExtremalRun trace_extremal(double phi_T, int s, const Params& p, const StopPolicy& policy) {
  if (s != 1 && s != -1) throw std::invalid_argument("trace_extremal: sign must be +1 or -1");
  if (!std::isfinite(phi_T)) throw std::invalid_argument("trace_extremal: phi_T must be finite");
  if (!(policy.energy_exit > 0.0) || !(policy.standstill_factor >= 0.0)) {
    throw std::invalid_argument("trace_extremal: bad stop policy");
  }
  const double eps = p.epsilon();
  const double E_stop = policy.energy_exit;
  const double y_stop = policy.speed_exit > 0.0 ? policy.speed_exit : std::sqrt(2.0 * E_stop);
  const double T_max = policy.time_budget > 0.0 ? policy.time_budget : 8.0 / eps;
  const double fe = policy.standstill_factor * eps;
  const bool zones = fe > 0.0 && fe < 1.0;

  ExtremalRun run;
  run.phi_T = phi_T;
  run.sign = s;
  run.epsilon = eps;
  run.zone_exit_time = zones ? -std::numeric_limits<double>::infinity() : 0.0;

  // The covector is carried as (eps phi, eps psi): same equations, order-one
  // terminal values.
  Vec<4> z{0.0, 0.0, eps * phi_T, static_cast<double>(s)};
  double u = s;
  double t = 0.0;

  Rhs<4> rhs = [&u, eps](double, const Vec<4>& q) {
    return Vec<4>{q[1], -std::sin(q[0]) + eps * u, std::cos(q[0]) * q[3], -q[2]};
  };
  auto energy_of = [](const Vec<4>& q) { return 0.5 * q[1] * q[1] + 1.0 - std::cos(q[0]); };
  auto lower_g = [fe](double, const Vec<4>& q) {
    return std::max({std::abs(std::sin(q[0])) - fe, std::abs(q[1]) - fe, -std::cos(q[0])});
  };

  std::vector<EventSpec<4>> events;
  events.push_back({[](double, const Vec<4>& q) { return q[3]; }, EventDirection::Any, true, "switch"});
  events.push_back({[](double, const Vec<4>& q) { return q[1]; }, EventDirection::Any, false, "turn"});
  events.push_back({[&](double, const Vec<4>& q) { return energy_of(q) - E_stop; },
                    EventDirection::Rising, true, "energy_exit"});
  events.push_back({[y_stop](double, const Vec<4>& q) { return std::abs(q[1]) - y_stop; },
                    EventDirection::Rising, true, "speed_exit"});
  if (zones) {
    events.push_back({[fe](double, const Vec<4>& q) {
                        return std::max({std::abs(std::sin(q[0])) - fe, std::abs(q[1]) - fe,
                                         std::cos(q[0])});
                      },
                      EventDirection::Falling, true, "upper_zone"});
    events.push_back({lower_g, EventDirection::Falling, true, "lower_zone"});
    events.push_back({lower_g, EventDirection::Rising, false, "lower_zone_exit"});
  }

  StepControl ctl = policy.step;
  ctl.record_samples = policy.record_samples;
  auto& traj = run.trajectory;
  traj.samples.push_back({0.0, to_physical(z, eps)});

  for (;;) {
    auto seg = integrate<4>(rhs, z, t, -T_max, events, ctl);
    traj.rhs_evaluations += seg.rhs_evaluations;
    traj.accepted_steps += seg.accepted_steps;
    traj.rejected_steps += seg.rejected_steps;
    for (std::size_t i = 1; i < seg.samples.size(); ++i) {
      traj.samples.push_back({seg.samples[i].t, to_physical(seg.samples[i].state, eps)});
    }
    for (const auto& ev : seg.events) {
      auto rec = ev;
      rec.state = to_physical(ev.state, eps);
      traj.events.push_back(rec);
      if (ev.spec_index == kTurn) {
        run.turns.push_back({ev.t, ev.state[0], energy_of(ev.state)});
      } else if (ev.spec_index == kLowerExit && std::isinf(run.zone_exit_time)) {
        run.zone_exit_time = ev.t;
      }
    }
    z = seg.final_state();
    t = seg.end_time();
    if (seg.stop_reason == StopReason::StepFailure) {
      run.stop_reason = ExtremalStop::StepFailure;
      run.diagnostic = seg.diagnostic;
      if (traj.samples.back().t != t) traj.samples.push_back({t, to_physical(z, eps)});
      break;
    }
    const auto* te = seg.terminal_event();
    if (te == nullptr) {
      run.stop_reason = ExtremalStop::TimeBudget;
      break;
    }
    if (te->spec_index == kSwitch) {
      SwitchRecord sw;
      sw.t = te->t;
      sw.state = as_state(to_physical(te->state, eps));
      sw.zone = zones ? standstill_zone(sw.state.phase(), p, policy.standstill_factor) : ZoneTag::None;
      run.switches.push_back(sw);
      z[3] = 0.0;
      u = -u;
      continue;
    }
    run.stop_reason = (te->spec_index == kEnergy || te->spec_index == kSpeed)
                          ? ExtremalStop::EnergyExit
                          : ExtremalStop::StandstillEntry;
    break;
  }
  traj.stop_reason = run.stop_reason == ExtremalStop::StepFailure ? StopReason::StepFailure
                     : run.stop_reason == ExtremalStop::TimeBudget ? StopReason::TimeLimit
                                                                     : StopReason::TerminalEvent;
  traj.diagnostic = run.diagnostic;

  // Counting cutoff: a half swing k > 1 whose energy gain falls below the
  // threshold times the dry-friction gain eps (X_{k-1} + X_k) ends the part of
  // the extremal that can still be time-optimal; count switchings up to the
  // previous turn.
  run.cutoff_time = t;
  double E_prev = 0.0, X_prev = 0.0;
  for (std::size_t k = 0; k < run.turns.size(); ++k) {
    const double E = run.turns[k].energy;
    const double X = amplitude_for_energy(std::clamp(E, 0.0, 2.0));
    if (k > 0) {
      const double gain = (E - E_prev) / (eps * (X_prev + X));
      if (gain < policy.efficiency_threshold) {
        run.cutoff_time = run.turns[k - 1].t;
        run.truncated = true;
        break;
      }
    }
    E_prev = E;
    X_prev = X;
  }
  for (auto& sw : run.switches) {
    sw.counted = sw.t > run.cutoff_time;
    if (sw.counted) ++run.switch_count;
  }
  run.raw_switch_count = static_cast<int>(run.switches.size());
  run.high_energy_allowance = (run.stop_reason == ExtremalStop::EnergyExit && !run.truncated) ? 1 : 0;
  return run;
}

SweepResult max_switchings(const Params& p, const SweepPolicy& policy) {
  const double eps = p.epsilon();
  const double phi_max = policy.phi_max > 0.0 ? policy.phi_max : 4.0 / eps;
  if (policy.points_per_sign < 2) {
    throw std::invalid_argument("max_switchings: need at least two grid points per sign");
  }
  const double spacing = 2.0 * phi_max / static_cast<double>(policy.points_per_sign - 1);
  const double refine = policy.refine_spacing > 0.0 ? policy.refine_spacing : spacing / 16.0;
  StopPolicy stop = policy.stop;
  stop.record_samples = false;

  using Job = std::pair<double, int>;
  auto evaluate = [&](const Job& job) {
    auto run = trace_extremal(job.first, job.second, p, stop);
    RunSummary r;
    r.phi_T = job.first;
    r.sign = job.second;
    r.switch_count = run.switch_count;
    r.raw_switch_count = run.raw_switch_count;
    r.high_energy_allowance = run.high_energy_allowance;
    r.stop_reason = run.stop_reason;
    r.duration = run.duration();
    return r;
  };

  SweepResult result;
  result.epsilon = eps;
  std::size_t budget = policy.refine_budget;

  for (int s : {-1, 1}) {
    std::vector<Job> jobs;
    for (std::size_t i = 0; i < policy.points_per_sign; ++i) {
      double phi = -phi_max + spacing * static_cast<double>(i);
      if (i + 1 == policy.points_per_sign) phi = phi_max;
      jobs.emplace_back(phi, s);
    }
    std::vector<RunSummary> family;
    run_parallel(jobs, family, policy.threads, evaluate);

    // Bisect every grid interval whose endpoints disagree on the count.
    for (;;) {
      std::vector<Job> mids;
      for (std::size_t i = 0; i + 1 < family.size(); ++i) {
        if (family[i].switch_count != family[i + 1].switch_count &&
            family[i + 1].phi_T - family[i].phi_T > refine) {
          mids.emplace_back(0.5 * (family[i].phi_T + family[i + 1].phi_T), s);
        }
      }
      if (mids.empty()) break;
      if (mids.size() > budget) {
        mids.resize(budget);
        result.unresolved = true;
      }
      if (mids.empty()) break;
      budget -= mids.size();
      std::vector<RunSummary> extra;
      run_parallel(mids, extra, policy.threads, evaluate);
      family.insert(family.end(), extra.begin(), extra.end());
      std::sort(family.begin(), family.end(),
                [](const RunSummary& a, const RunSummary& b) { return a.phi_T < b.phi_T; });
    }

    const std::size_t last = family.size() - 1;
    if (family[0].switch_count > family[1].switch_count ||
        family[last].switch_count > family[last - 1].switch_count) {
      result.boundary_flag = true;
    }
    int& family_max = result.max_per_sign[s > 0 ? 1 : 0];
    for (const auto& r : family) {
      family_max = std::max(family_max, r.switch_count);
      result.bound_with_allowance =
          std::max(result.bound_with_allowance, r.switch_count + r.high_energy_allowance);
      if (r.switch_count > result.max_switchings) {
        result.max_switchings = r.switch_count;
        result.argmax_phi_T = r.phi_T;
        result.argmax_sign = r.sign;
      }
    }
    result.runs.insert(result.runs.end(), family.begin(), family.end());
  }
  return result;
}

namespace {

int count_at(double eps, const SweepPolicy& policy) {
  return max_switchings(Params(eps), policy).max_switchings;
}

BifurcationRow bisect_bifurcation(int n, double lo, double hi, double tol,
                                  const SweepPolicy& policy) {
  const int target = n + 1;
  BifurcationRow row;
  row.n = n;
  while (hi - lo > tol) {
    const double mid = 0.5 * (lo + hi);
    if (count_at(mid, policy) >= target) {
      lo = mid;
    } else {
      hi = mid;
    }
  }
  row.eps_lo = lo;
  row.eps_hi = hi;
  row.epsilon_n = 0.5 * (lo + hi);
  row.product = n * row.epsilon_n;
  row.bracket_width = hi - lo;
  return row;
}

BifurcationRow scan_and_bisect(int n, double start, double tol, const SweepPolicy& policy) {
  const int target = n + 1;
  constexpr int kMaxScan = 60;
  double lo = 0.0, hi = 0.0;
  double e = start;
  if (count_at(e, policy) >= target) {
    lo = e;
    for (int i = 0; i < kMaxScan && hi == 0.0; ++i) {
      e *= 1.25;
      if (count_at(e, policy) < target) hi = e; else lo = e;
    }
  } else {
    hi = e;
    for (int i = 0; i < kMaxScan && lo == 0.0; ++i) {
      e *= 0.8;
      if (count_at(e, policy) >= target) lo = e; else hi = e;
    }
  }
  if (lo == 0.0 || hi == 0.0) {
    BifurcationRow row;
    row.n = n;
    row.status = BifurcationStatus::BracketViolation;
    row.diagnostic = "no bracket found by geometric scanning";
    return row;
  }
  return bisect_bifurcation(n, lo, hi, tol, policy);
}

}  // namespace

BifurcationRow find_bifurcation(int n, double eps_lo, double eps_hi, double tol,
                                const SweepPolicy& policy) {
  if (n < 1) throw std::invalid_argument("find_bifurcation: n must be at least 1");
  if (!(tol > 0.0)) throw std::invalid_argument("find_bifurcation: tolerance must be positive");
  if (eps_lo <= 0.0 || eps_hi <= 0.0) return scan_and_bisect(n, 1.0 / n, tol, policy);
  if (!(eps_lo < eps_hi)) throw std::invalid_argument("find_bifurcation: need eps_lo < eps_hi");
  const int target = n + 1;
  const int c_lo = count_at(eps_lo, policy);
  const int c_hi = count_at(eps_hi, policy);
  if (c_lo < target || c_hi >= target) {
    BifurcationRow row;
    row.n = n;
    row.eps_lo = eps_lo;
    row.eps_hi = eps_hi;
    row.status = BifurcationStatus::BracketViolation;
    row.diagnostic = "max switchings " + std::to_string(c_lo) + " at eps_lo and " +
                     std::to_string(c_hi) + " at eps_hi, target " + std::to_string(target);
    return row;
  }
  return bisect_bifurcation(n, eps_lo, eps_hi, tol, policy);
}

BifurcationTable bifurcation_table(int n_max, double tol, const SweepPolicy& policy) {
  if (n_max < 1) throw std::invalid_argument("bifurcation_table: n_max must be at least 1");
  BifurcationTable table;
  double start = 1.0;
  for (int n = 1; n <= n_max; ++n) {
    auto row = scan_and_bisect(n, start, tol, policy);
    if (row.status == BifurcationStatus::Ok) {
      start = row.eps_lo * n / (n + 1.0);
    } else {
      start = start * n / (n + 1.0);
    }
    table.push_back(row);
  }
  return table;
}

SturmReport verify_sturm_properties(const ExtremalRun& run, double gap_tolerance) {
  SturmReport rep;
  const auto& sw = run.switches;
  if (sw.size() < 2) return rep;
  rep.min_gap = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i + 1 < sw.size(); ++i) {
    const double gap = std::abs(sw[i + 1].t - sw[i].t);
    rep.gaps.push_back(gap);
    rep.min_gap = std::min(rep.min_gap, gap);
    if (gap < kPi - gap_tolerance) rep.gaps_pass = false;

    // The run stops on any standstill entry, so only arcs inside the initial
    // lower zone can touch it; those are skipped.
    const bool in_zone = sw[i].zone != ZoneTag::None || sw[i + 1].zone != ZoneTag::None ||
                         sw[i].t > run.zone_exit_time;
    if (in_zone) continue;
    int between = 0;
    for (const auto& turn : run.turns) {
      if (turn.t < sw[i].t && turn.t > sw[i + 1].t) ++between;
    }
    rep.turns_between.push_back(between);
    if (between != 1) rep.interleaving_pass = false;
    const double prod = sw[i].state.y * sw[i + 1].state.y;
    rep.sign_products.push_back(prod);
    if (!(prod < 0.0)) rep.opposition_pass = false;
  }
  return rep;
}

}  // namespace pendamp
