#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "pendamp/dynamics.hpp"
#include "pendamp/integrator.hpp"

namespace pendamp {

/// Phase point together with its adjoint (phi, psi).
struct ExtremalState {
  double x = 0.0;
  double y = 0.0;
  double phi = 0.0;
  double psi = 0.0;

  PhaseState phase() const { return {x, y}; }
};

/// (y, -sin x + eps sign(psi), cos(x) psi, -phi). Throws std::domain_error for psi == 0.
ExtremalState canonical_field(const ExtremalState& e, const Params& p);

/// The costate that ends an extremal at the origin: (0, 0, phi_T, s/eps).
ExtremalState terminal_costate(double phi_T, int s, const Params& p);

/// y phi - sin(x) psi + eps |psi| - 1; zero along every extremal.
double hamiltonian_residual(const ExtremalState& e, const Params& p);

enum class ExtremalStop { EnergyExit, TimeBudget, StandstillEntry, StepFailure };

const char* to_string(ExtremalStop r);

/// How a backward extremal is cut off and how its switchings are counted.
struct StopPolicy {
  double energy_exit = 2.5;
  double speed_exit = 0.0;      // <= 0 means sqrt(2 * energy_exit)
  double time_budget = 0.0;     // <= 0 means 8 / eps
  double standstill_factor = 2.0;  // 0 disables the standstill stop
  // Switchings are only counted while every completed half swing still gains
  // at least this fraction of the energy that full dry friction would
  // (eps * (X_prev + X)); see ExtremalRun::cutoff_time.
  double efficiency_threshold = 0.5;
  bool record_samples = true;
  StepControl step{};
};

struct SwitchRecord {
  double t = 0.0;
  ExtremalState state;
  ZoneTag zone = ZoneTag::None;
  bool counted = true;
};

struct TurnRecord {
  double t = 0.0;
  double x = 0.0;
  double energy = 0.0;
};

struct ExtremalRun {
  // Samples hold (x, y, phi, psi) in unscaled adjoint units; time runs from 0
  // down to -duration.
  TrajectorySegment<4> trajectory;
  std::vector<SwitchRecord> switches;
  std::vector<TurnRecord> turns;  // zeros of y
  int switch_count = 0;           // switchings before the cutoff
  int raw_switch_count = 0;       // every zero of psi along the run
  int high_energy_allowance = 0;  // 1 when the run left through the energy exit
  ExtremalStop stop_reason = ExtremalStop::TimeBudget;
  double cutoff_time = 0.0;       // backward time where counting stopped; equals the end if no cutoff
  bool truncated = false;
  // First exit from the initial lower standstill zone: -inf if the run never
  // left it, 0 when zones are not checked (factor * eps >= 1).
  double zone_exit_time = 0.0;
  double phi_T = 0.0;
  int sign = 1;
  double epsilon = 0.0;
  std::string diagnostic;

  double duration() const { return -trajectory.end_time(); }
};

/// Integrates the canonical system backward in time from terminal_costate(phi_T, s).
ExtremalRun trace_extremal(double phi_T, int s, const Params& p, const StopPolicy& policy = {});

struct SweepPolicy {
  double phi_max = 0.0;             // <= 0 means 4 / eps
  std::size_t points_per_sign = 512;
  double refine_spacing = 0.0;      // <= 0 means initial spacing / 16
  std::size_t refine_budget = 4096; // extra runs allowed for refinement
  StopPolicy stop{};
  unsigned threads = 1;
};

struct RunSummary {
  double phi_T = 0.0;
  int sign = 1;
  int switch_count = 0;
  int raw_switch_count = 0;
  int high_energy_allowance = 0;
  ExtremalStop stop_reason = ExtremalStop::TimeBudget;
  double duration = 0.0;
};

struct SweepResult {
  double epsilon = 0.0;
  int max_switchings = 0;
  double argmax_phi_T = 0.0;
  int argmax_sign = 1;
  int max_per_sign[2] = {0, 0};   // s = -1, s = +1
  int bound_with_allowance = 0;   // max of switch_count + high_energy_allowance
  bool boundary_flag = false;     // counts still rising at |phi_T| = phi_max
  bool unresolved = false;        // refinement budget ran out
  std::vector<RunSummary> runs;   // sorted by (sign, phi_T)
};

SweepResult max_switchings(const Params& p, const SweepPolicy& policy = {});

enum class BifurcationStatus { Ok, BracketViolation };

const char* to_string(BifurcationStatus s);

struct BifurcationRow {
  int n = 0;
  double epsilon_n = 0.0;
  double product = 0.0;
  double bracket_width = 0.0;
  double eps_lo = 0.0;  // max count >= n + 1 here
  double eps_hi = 0.0;  // max count < n + 1 here
  BifurcationStatus status = BifurcationStatus::Ok;
  std::string diagnostic;
};

/// Largest eps at which the maximal switching number reaches n + 1 (so that
/// n counts the bifurcations: the count is 1 for large eps). A zero bracket
/// entry asks for automatic geometric scanning.
BifurcationRow find_bifurcation(int n, double eps_lo, double eps_hi, double tol,
                                const SweepPolicy& policy = {});

using BifurcationTable = std::vector<BifurcationRow>;

BifurcationTable bifurcation_table(int n_max, double tol, const SweepPolicy& policy = {});

struct SturmReport {
  std::vector<double> gaps;         // between adjacent switchings
  double min_gap = 0.0;
  bool gaps_pass = true;
  std::vector<int> turns_between;   // y-zeros between adjacent switchings outside the zone
  bool interleaving_pass = true;
  std::vector<double> sign_products;  // y(t1) y(t2) for the same pairs
  bool opposition_pass = true;
  bool pass() const { return gaps_pass && interleaving_pass && opposition_pass; }
};

SturmReport verify_sturm_properties(const ExtremalRun& run, double gap_tolerance = 1e-6);

}  // namespace pendamp
