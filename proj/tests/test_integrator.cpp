#include <gtest/gtest.h>

#include <cmath>

#include "pendamp/dynamics.hpp"
#include "pendamp/integrator.hpp"
#include "pendamp/limits.hpp"

using namespace pendamp;

namespace {

Rhs<2> free_pendulum() {
  return [](double, const Vec<2>& q) { return Vec<2>{q[1], -std::sin(q[0])}; };
}

double E2(const Vec<2>& q) { return energy({q[0], q[1]}); }

}  // namespace

TEST(Integrate, ConservesEnergyOfFreePendulum) {
  const auto seg = integrate<2>(free_pendulum(), {1.0, 0.0}, 0.0, 50.0, {});
  ASSERT_EQ(seg.stop_reason, StopReason::TimeLimit);
  const double E0 = E2({1.0, 0.0});
  for (const auto& s : seg.samples) EXPECT_NEAR(E2(s.state), E0, 1e-9);
  EXPECT_DOUBLE_EQ(seg.end_time(), 50.0);
}

TEST(Integrate, ReturnsAfterOneCycle) {
  // y = 0 rising is first met at x = -1, then after the next half swing at x = 1.
  EventSpec<2> turn{[](double, const Vec<2>& q) { return q[1]; }, EventDirection::Rising, false, "turn"};
  EventSpec<2> back{[](double, const Vec<2>& q) { return q[1]; }, EventDirection::Falling, true, "back"};
  const auto seg = integrate<2>(free_pendulum(), {1.0, 0.0}, 0.0, 100.0, {turn, back});
  ASSERT_EQ(seg.stop_reason, StopReason::TerminalEvent);
  const auto* te = seg.terminal_event();
  ASSERT_NE(te, nullptr);
  EXPECT_EQ(te->label, "back");
  EXPECT_NEAR(te->state[0], 1.0, 1e-8);
  EXPECT_NEAR(te->state[1], 0.0, 1e-10);
  ASSERT_EQ(seg.events.size(), 2u);
  EXPECT_NEAR(seg.events[0].state[0], -1.0, 1e-8);
}

TEST(Integrate, SmallOscillationPeriodMatchesQuadrature) {
  const double x0 = 1e-3;
  EventSpec<2> ev{[](double, const Vec<2>& q) { return q[1]; }, EventDirection::Falling, true, "y0"};
  // Leave the starting turn point first; the second falling crossing closes the cycle.
  const auto half = integrate<2>(free_pendulum(), {x0, 0.0}, 0.0, 1.0, {});
  const auto seg = integrate<2>(free_pendulum(), half.final_state(), half.end_time(), 20.0, {ev});
  ASSERT_NE(seg.terminal_event(), nullptr);
  const double period = oscillation_period(1.0 - std::cos(x0)).value;
  EXPECT_NEAR(seg.terminal_event()->t, period, 1e-7);
}

TEST(Integrate, BackwardRunRetracesForwardRun) {
  const Vec<2> s0{0.3, 1.1};
  const auto fwd = integrate<2>(free_pendulum(), s0, 0.0, 7.0, {});
  const auto bwd = integrate<2>(free_pendulum(), fwd.final_state(), 7.0, 0.0, {});
  EXPECT_NEAR(bwd.final_state()[0], s0[0], 1e-8);
  EXPECT_NEAR(bwd.final_state()[1], s0[1], 1e-8);
  EXPECT_DOUBLE_EQ(bwd.end_time(), 0.0);
}

TEST(Integrate, DirectionRefersToIntegrationDirection) {
  // g = t grows forward; integrated backward it decreases through 0.5.
  EventSpec<1> rising{[](double t, const Vec<1>&) { return t - 0.5; }, EventDirection::Rising, false, "r"};
  EventSpec<1> falling{[](double t, const Vec<1>&) { return t - 0.5; }, EventDirection::Falling, false, "f"};
  Rhs<1> rhs = [](double, const Vec<1>&) { return Vec<1>{1.0}; };
  const auto seg = integrate<1>(rhs, {1.0}, 1.0, 0.0, {rising, falling});
  ASSERT_EQ(seg.events.size(), 1u);
  EXPECT_EQ(seg.events[0].label, "f");
  EXPECT_NEAR(seg.events[0].t, 0.5, 1e-11);
  EXPECT_NEAR(seg.events[0].state[0], 0.5, 1e-11);
}

TEST(Integrate, EventAtStartIsNotRetriggered) {
  EventSpec<2> ev{[](double, const Vec<2>& q) { return q[1]; }, EventDirection::Any, true, "turn"};
  const auto seg = integrate<2>(free_pendulum(), {1.0, 0.0}, 0.0, 100.0, {ev});
  ASSERT_NE(seg.terminal_event(), nullptr);
  EXPECT_GT(seg.terminal_event()->t, 1.0);
  EXPECT_NEAR(seg.terminal_event()->state[0], -1.0, 1e-8);
}

TEST(Integrate, DenseSamplingAddsUniformSamples) {
  StepControl ctl;
  ctl.sample_interval = 0.01;
  const auto seg = integrate<2>(free_pendulum(), {1.0, 0.0}, 0.0, 1.0, {}, ctl);
  EXPECT_GE(seg.samples.size(), 100u);
  for (std::size_t i = 1; i < seg.samples.size(); ++i) EXPECT_GT(seg.samples[i].t, seg.samples[i - 1].t);
}

TEST(Integrate, WithoutSamplesKeepsEndpoints) {
  StepControl ctl;
  ctl.record_samples = false;
  const auto seg = integrate<2>(free_pendulum(), {1.0, 0.0}, 0.0, 3.0, {}, ctl);
  ASSERT_GE(seg.samples.size(), 2u);
  EXPECT_DOUBLE_EQ(seg.start_time(), 0.0);
  EXPECT_DOUBLE_EQ(seg.end_time(), 3.0);
}

TEST(Integrate, RejectsBadControl) {
  StepControl ctl;
  ctl.rel_tol = 0.0;
  EXPECT_THROW(integrate<2>(free_pendulum(), {1.0, 0.0}, 0.0, 1.0, {}, ctl), std::invalid_argument);
  EXPECT_THROW(integrate<2>(free_pendulum(), {1.0, 0.0}, 1.0, 1.0, {}), std::invalid_argument);
}

TEST(Integrate, ReportsStepFailureOnBlowUp) {
  Rhs<1> rhs = [](double, const Vec<1>& q) { return Vec<1>{q[0] * q[0]}; };
  const auto seg = integrate<1>(rhs, {1.0}, 0.0, 2.0, {});
  EXPECT_EQ(seg.stop_reason, StopReason::StepFailure);
  EXPECT_FALSE(seg.diagnostic.empty());
  EXPECT_LT(seg.end_time(), 1.0 + 1e-6);
}
