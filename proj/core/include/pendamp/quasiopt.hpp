#pragma once

#include <string>
#include <vector>

#include "pendamp/dynamics.hpp"
#include "pendamp/integrator.hpp"

namespace pendamp {

/// u = -sign y. Throws std::domain_error at y == 0 and inside the standstill
/// zone (factor 2), where the law is not used.
int dry_friction_control(const PhaseState& s, const Params& p);

struct CapturePolicy {
  double capture_k = 4.0;       // capture once E <= capture_k * eps^2 inside the lower zone
  double zone_factor = 2.0;     // standstill zone half width in units of eps
  double time_budget = 0.0;     // <= 0 means 64 / eps
  double coast_budget = 0.0;    // per coast arc; <= 0 means 4 log(1/eps) + 16
  bool record_samples = true;
  StepControl step{};
};

enum class Mode { DryFriction, Coast, Maneuver, Capture };

const char* to_string(Mode m);

struct PhaseEntry {
  Mode mode = Mode::DryFriction;
  double t_start = 0.0;
  double t_end = 0.0;
  PhaseState start;
  PhaseState end;
  int control = 0;
};

enum class DampingStatus { Captured, BudgetExceeded, StepFailure };

const char* to_string(DampingStatus s);

struct SectionCrossing {
  double t = 0.0;
  double x = 0.0;
  double y = 0.0;
};

struct DampingResult {
  double damping_time = 0.0;
  int switch_count = 0;          // sign changes of y outside the standstill zones
  TrajectorySegment<2> trajectory;
  std::vector<PhaseEntry> phase_log;
  PhaseState terminal_state;
  DampingStatus status = DampingStatus::Captured;
  std::vector<SectionCrossing> turns;     // y = 0 under dry friction
  std::vector<SectionCrossing> crossings; // x = pi mod 2 pi under dry friction
  int maneuvers = 0;
  std::string diagnostic;
};

/// Closed-loop damping with the dry-friction law and the standstill-zone
/// mode machine. Requires zone_factor * eps < 1.
DampingResult simulate_damping(const PhaseState& p0, const Params& p,
                               const CapturePolicy& policy = {});

struct ScalingRow {
  double epsilon = 0.0;
  double T = 0.0;
  int N = 0;
  double eps_T = 0.0;
  double eps_N = 0.0;
  DampingStatus status = DampingStatus::Captured;
};

/// a + b eps fitted by least squares; `a` is the eps -> 0 extrapolation.
struct LinearFit {
  double a = 0.0;
  double b = 0.0;
};

LinearFit fit_linear(const std::vector<double>& eps, const std::vector<double>& values);

struct ScalingTable {
  PhaseState p0;
  std::vector<ScalingRow> rows;
  LinearFit eps_T_fit;
  LinearFit eps_N_fit;
  std::vector<DampingResult> runs;
};

ScalingTable sweep_scaling(const PhaseState& p0, const std::vector<double>& eps_list,
                           const CapturePolicy& policy = {}, unsigned threads = 1);

}  // namespace pendamp
