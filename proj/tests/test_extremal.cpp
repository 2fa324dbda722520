#include <gtest/gtest.h>

#include <cmath>

#include "pendamp/extremal.hpp"

using namespace pendamp;

namespace {

constexpr double kD = 0.925968526;

SweepPolicy coarse(std::size_t points = 128) {
  SweepPolicy sp;
  sp.points_per_sign = points;
  return sp;
}

}  // namespace

TEST(CanonicalField, PointValues) {
  const Params p(0.1);
  auto d = canonical_field({0.0, 0.0, 0.7, 2.0}, p);
  EXPECT_EQ(d.x, 0.0);
  EXPECT_NEAR(d.y, 0.1, 1e-15);
  EXPECT_DOUBLE_EQ(d.phi, 2.0);
  EXPECT_DOUBLE_EQ(d.psi, -0.7);

  d = canonical_field({kPi, 1.0, 2.0, -3.0}, p);
  EXPECT_DOUBLE_EQ(d.x, 1.0);
  EXPECT_NEAR(d.y, -0.1, 1e-15);
  EXPECT_NEAR(d.phi, 3.0, 1e-15);
  EXPECT_DOUBLE_EQ(d.psi, -2.0);
}

TEST(CanonicalField, OddSymmetry) {
  const Params p(0.3);
  const ExtremalState e{0.4, -1.2, 0.8, 0.5};
  const auto a = canonical_field(e, p);
  const auto b = canonical_field({-e.x, -e.y, -e.phi, -e.psi}, p);
  EXPECT_NEAR(a.x, -b.x, 1e-15);
  EXPECT_NEAR(a.y, -b.y, 1e-15);
  EXPECT_NEAR(a.phi, -b.phi, 1e-15);
  EXPECT_NEAR(a.psi, -b.psi, 1e-15);
}

TEST(CanonicalField, UndefinedAtSwitching) {
  EXPECT_THROW(canonical_field({0.0, 1.0, 1.0, 0.0}, Params(0.1)), std::domain_error);
}

TEST(TerminalCostate, ForcedByHamiltonian) {
  auto e = terminal_costate(0.0, 1, Params(0.5));
  EXPECT_EQ(e.x, 0.0);
  EXPECT_EQ(e.y, 0.0);
  EXPECT_EQ(e.phi, 0.0);
  EXPECT_DOUBLE_EQ(e.psi, 2.0);

  e = terminal_costate(3.0, -1, Params(0.1));
  EXPECT_DOUBLE_EQ(e.phi, 3.0);
  EXPECT_DOUBLE_EQ(e.psi, -10.0);
  for (double phi : {-7.0, 0.0, 0.3, 40.0}) {
    for (int s : {-1, 1}) {
      EXPECT_NEAR(hamiltonian_residual(terminal_costate(phi, s, Params(0.2)), Params(0.2)), 0.0, 1e-14);
    }
  }
  EXPECT_THROW(terminal_costate(0.0, 0, Params(0.1)), std::invalid_argument);
}

TEST(HamiltonianResidual, PointValues) {
  EXPECT_DOUBLE_EQ(hamiltonian_residual({0.0, 1.0, 1.0, 0.0}, Params(0.7)), 0.0);
  EXPECT_DOUBLE_EQ(hamiltonian_residual({0.0, 2.0, 1.0, 0.0}, Params(0.7)), 1.0);
}

TEST(TraceExtremal, ResidualStaysZeroAlongTheRun) {
  const Params p(0.2);
  StopPolicy sp;
  sp.standstill_factor = 0.0;
  const auto run = trace_extremal(1.3, 1, p, sp);
  ASSERT_GT(run.trajectory.samples.size(), 10u);
  for (const auto& s : run.trajectory.samples) {
    const ExtremalState e{s.state[0], s.state[1], s.state[2], s.state[3]};
    EXPECT_NEAR(hamiltonian_residual(e, p), 0.0, 1e-7);
  }
  EXPECT_LT(run.trajectory.end_time(), 0.0);
}

TEST(TraceExtremal, StopsAtTheEnergyExit) {
  const auto run = trace_extremal(5.0, 1, Params(0.2));
  EXPECT_EQ(run.stop_reason, ExtremalStop::EnergyExit);
  const auto& q = run.trajectory.final_state();
  EXPECT_NEAR(energy({q[0], q[1]}), 2.5, 1e-8);
  EXPECT_EQ(run.high_energy_allowance, 1);
}

TEST(TraceExtremal, SwitchingsAreZerosOfPsi) {
  const auto run = trace_extremal(2.0, -1, Params(0.2));
  ASSERT_GE(run.switches.size(), 2u);
  for (const auto& s : run.switches) {
    EXPECT_NEAR(s.state.psi, 0.0, 1e-9);
    // y phi = 1 at a switching point.
    EXPECT_NEAR(s.state.y * s.state.phi, 1.0, 1e-6);
  }
  EXPECT_EQ(run.raw_switch_count, static_cast<int>(run.switches.size()));
  EXPECT_LE(run.switch_count, run.raw_switch_count);
}

TEST(TraceExtremal, LargeControlSwitchesAtMostOnce) {
  const Params p(5.0);
  for (int s : {-1, 1}) {
    for (int i = 0; i <= 40; ++i) {
      const double phi = -0.8 + 0.04 * i;
      EXPECT_LE(trace_extremal(phi, s, p).switch_count, 1) << phi;
    }
  }
}

TEST(TraceExtremal, SignsAreMirrorImages) {
  const Params p(0.3);
  const auto a = trace_extremal(1.1, 1, p);
  const auto b = trace_extremal(-1.1, -1, p);
  EXPECT_EQ(a.switch_count, b.switch_count);
  EXPECT_NEAR(a.duration(), b.duration(), 1e-9);
  EXPECT_NEAR(a.trajectory.final_state()[0], -b.trajectory.final_state()[0], 1e-9);
}

TEST(SturmProperties, GapsAndInterleavingOnOneRun) {
  const auto run = trace_extremal(2.0, 1, Params(0.1));
  const auto rep = verify_sturm_properties(run);
  EXPECT_TRUE(rep.pass());
  for (double g : rep.gaps) EXPECT_GE(g, kPi - 1e-6);
  for (int k : rep.turns_between) EXPECT_EQ(k, 1);
  for (double prod : rep.sign_products) EXPECT_LT(prod, 0.0);
}

TEST(SturmProperties, EmptyRunPasses) {
  ExtremalRun run;
  const auto rep = verify_sturm_properties(run);
  EXPECT_TRUE(rep.pass());
  EXPECT_TRUE(rep.gaps.empty());
}

TEST(MaxSwitchings, SymmetricFamiliesAndMonotoneInEpsilon) {
  const auto a = max_switchings(Params(0.8), coarse());
  const auto b = max_switchings(Params(0.4), coarse());
  const auto c = max_switchings(Params(0.2), coarse());
  EXPECT_LE(a.max_switchings, b.max_switchings);
  EXPECT_LE(b.max_switchings, c.max_switchings);
  for (const auto* r : {&a, &b, &c}) EXPECT_EQ(r->max_per_sign[0], r->max_per_sign[1]);
  EXPECT_GE(0.2 * c.max_switchings, 0.5 * kD);
  EXPECT_LE(0.2 * c.max_switchings, 1.5 * kD);
}

TEST(MaxSwitchings, RegressionAnchors) {
  // Counts measured with the default 512-point grid.
  EXPECT_EQ(max_switchings(Params(0.4)).max_switchings, 3);
  EXPECT_EQ(max_switchings(Params(0.2)).max_switchings, 5);
}

TEST(MaxSwitchings, ThreadCountDoesNotChangeTheResult) {
  auto sp = coarse(64);
  const auto one = max_switchings(Params(0.3), sp);
  sp.threads = 3;
  const auto three = max_switchings(Params(0.3), sp);
  ASSERT_EQ(one.runs.size(), three.runs.size());
  EXPECT_EQ(one.max_switchings, three.max_switchings);
  for (std::size_t i = 0; i < one.runs.size(); ++i) {
    EXPECT_EQ(one.runs[i].phi_T, three.runs[i].phi_T);
    EXPECT_EQ(one.runs[i].switch_count, three.runs[i].switch_count);
  }
}

TEST(FindBifurcation, BracketsTheIncrement) {
  const auto sp = coarse();
  const auto row = find_bifurcation(1, 0.0, 0.0, 1e-4, sp);
  ASSERT_EQ(row.status, BifurcationStatus::Ok);
  EXPECT_LE(row.bracket_width, 1e-4);
  EXPECT_GE(max_switchings(Params(row.eps_lo), sp).max_switchings, 2);
  EXPECT_LT(max_switchings(Params(row.eps_hi), sp).max_switchings, 2);
  EXPECT_DOUBLE_EQ(row.product, row.n * row.epsilon_n);
}

TEST(FindBifurcation, ReportsABadBracket) {
  // Both ends have a single switching, so nothing is bracketed.
  const auto row = find_bifurcation(1, 2.0, 3.0, 1e-3, coarse(32));
  EXPECT_EQ(row.status, BifurcationStatus::BracketViolation);
  EXPECT_FALSE(row.diagnostic.empty());
}

TEST(BifurcationTable, DecreasingValues) {
  const auto table = bifurcation_table(3, 1e-3, coarse());
  ASSERT_EQ(table.size(), 3u);
  for (std::size_t i = 1; i < table.size(); ++i) {
    EXPECT_LT(table[i].epsilon_n, table[i - 1].epsilon_n);
  }
  for (const auto& r : table) EXPECT_EQ(r.status, BifurcationStatus::Ok);
}
