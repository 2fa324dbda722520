#include "pendamp/tools/survey.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <thread>

namespace pendamp::tools {

unsigned resolve_threads(unsigned requested) {
  if (requested > 0) return requested;
  return std::max(1u, std::thread::hardware_concurrency());
}

ExtremalSurvey survey_extremals(const Params& p, const SweepPolicy& policy, double gap_tolerance) {
  ExtremalSurvey out;
  out.sweep = max_switchings(p, policy);
  const auto& runs = out.sweep.runs;
  out.runs = runs.size();

  StopPolicy stop = policy.stop;
  stop.record_samples = false;
  std::vector<SturmReport> reports(runs.size());
  std::vector<double> margins(runs.size());
  auto work = [&](std::size_t i) {
    const auto run = trace_extremal(runs[i].phi_T, runs[i].sign, p, stop);
    reports[i] = verify_sturm_properties(run, gap_tolerance);
    margins[i] = run.duration() / kPi + 1.0 - run.raw_switch_count;
  };
  const unsigned workers = std::min<unsigned>(resolve_threads(policy.threads),
                                              std::max<std::size_t>(1, runs.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < runs.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < runs.size(); i = next++) work(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  out.min_gap = std::numeric_limits<double>::infinity();
  out.worst_lemma_margin = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < runs.size(); ++i) {
    const auto& rep = reports[i];
    for (double g : rep.gaps) {
      if (g < out.min_gap) {
        out.min_gap = g;
        out.worst_gap_phi_T = runs[i].phi_T;
        out.worst_gap_sign = runs[i].sign;
      }
      if (g < kPi - gap_tolerance) ++out.gap_violations;
    }
    out.checked_pairs += rep.turns_between.size();
    for (int k : rep.turns_between) {
      if (k != 1) ++out.interleaving_violations;
    }
    for (double prod : rep.sign_products) {
      if (!(prod < 0.0)) ++out.opposition_violations;
    }
    if (margins[i] < 0.0) ++out.lemma_violations;
    out.worst_lemma_margin = std::min(out.worst_lemma_margin, margins[i]);
  }
  return out;
}

}  // namespace pendamp::tools
