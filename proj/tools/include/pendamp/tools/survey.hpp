#pragma once

#include <cstddef>
#include <vector>

#include "pendamp/extremal.hpp"

namespace pendamp::tools {

/// Structural checks over every extremal of a switching sweep.
struct ExtremalSurvey {
  SweepResult sweep;
  std::size_t runs = 0;
  std::size_t checked_pairs = 0;      // adjacent switchings whose arc avoids the zone
  double min_gap = 0.0;               // over all adjacent switchings; inf without pairs
  std::size_t gap_violations = 0;
  std::size_t interleaving_violations = 0;
  std::size_t opposition_violations = 0;
  std::size_t lemma_violations = 0;   // raw switchings > duration / pi + 1
  double worst_lemma_margin = 0.0;    // min of duration / pi + 1 - raw count
  double worst_gap_phi_T = 0.0;
  int worst_gap_sign = 1;
};

/// Runs max_switchings and retraces every run of the sweep for the checks.
/// The reduction is done in sweep order, so the result does not depend on threads.
ExtremalSurvey survey_extremals(const Params& p, const SweepPolicy& policy,
                                double gap_tolerance = 1e-6);

unsigned resolve_threads(unsigned requested);

}  // namespace pendamp::tools
