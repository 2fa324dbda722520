#include <gtest/gtest.h>

#include <cmath>
#include <limits>

#include "pendamp/limits.hpp"
#include "pendamp/quadrature.hpp"

using namespace pendamp;

namespace {

// Complete elliptic integral of the first kind by the arithmetic-geometric
// mean, from the complementary modulus.
double agm_Kc(double kc) {
  double a = 1.0, b = kc;
  for (int i = 0; i < 60 && std::abs(a - b) > 1e-16 * a; ++i) {
    const double an = 0.5 * (a + b);
    b = std::sqrt(a * b);
    a = an;
  }
  return kPi / (2.0 * a);
}

double agm_K(double k) { return agm_Kc(std::sqrt((1.0 - k) * (1.0 + k))); }

// Si(x)/2 from its Taylor series.
double half_si(double x) {
  double term = x, sum = 0.0;
  for (int k = 0; k < 60; ++k) {
    sum += term / (2 * k + 1);
    term *= -x * x / ((2 * k + 2) * (2 * k + 3));
  }
  return 0.5 * sum;
}

// Midpoint rule with many nodes; crude but independent of the adaptive rules.
template <typename F>
double midpoint(F f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = 0.0;
  for (int i = 0; i < n; ++i) s += f(a + (i + 0.5) * h);
  return s * h;
}

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TEST(Quadrature, PolynomialAndSingularIntegrands) {
  const auto p = gauss_kronrod([](double x) { return x * x * x - x; }, 0.0, 2.0, 1e-12);
  EXPECT_NEAR(p.value, 2.0, 1e-13);
  EXPECT_TRUE(p.converged);
  const auto s = tanh_sinh([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0, 1e-12);
  EXPECT_NEAR(s.value, 2.0, 1e-11);
  const auto l = tanh_sinh([](double x) { return std::log(x); }, 0.0, 1.0, 1e-12);
  EXPECT_NEAR(l.value, -1.0, 1e-11);
}

TEST(Quadrature, BudgetExhaustionIsReported) {
  const auto r = gauss_kronrod([](double x) { return std::sin(1.0 / x); }, 1e-6, 1.0, 1e-14, 200);
  EXPECT_FALSE(r.converged);
  EXPECT_LE(r.evaluations, 400u);
}

TEST(ConstantD, MatchesReferenceAndSeries) {
  const auto D = constant_D(1e-8);
  EXPECT_NEAR(D.value, 0.925968526, 1e-8);
  EXPECT_NEAR(constant_D(1e-12).value, half_si(kPi), 1e-12);
  EXPECT_THROW(constant_D(1e-14), std::invalid_argument);
}

TEST(SincHalf, EndpointValues) {
  EXPECT_EQ(sinc_half(0.0), 0.5);
  EXPECT_NEAR(sinc_half(kPi), 0.0, 1e-16);
  EXPECT_NEAR(sinc_half(1e-9), 0.5, 1e-15);
}

TEST(HalfSineIntegral, SeriesAndInverse) {
  for (double X : {0.1, 1.0, 2.5, kPi, 5.0}) EXPECT_NEAR(half_sine_integral(X), half_si(X), 1e-13);
  for (double X : {0.01, 1.0, 3.0}) {
    EXPECT_NEAR(inverse_half_sine_integral(half_sine_integral(X)), X, 1e-10);
  }
}

TEST(QuarterPeriod, MatchesAgm) {
  for (double kc : {1.0, 0.5, 1e-3, 1e-8}) {
    EXPECT_NEAR(quarter_period(kc, 1e-12).value, agm_Kc(kc), 1e-10 * agm_Kc(kc)) << kc;
  }
}

TEST(PeriodIntegral, PositiveBranchMatchesEllipticForm) {
  for (double h : {1.0, 1e-2, 1e-4}) {
    const double oracle = 4.0 / std::sqrt(2.0 + h) * agm_K(std::sqrt(2.0 / (2.0 + h)));
    EXPECT_NEAR(period_integral(h).value, oracle, 1e-8 * oracle) << h;
  }
}

TEST(PeriodIntegral, UnitValueWithinMonotoneBounds) {
  const double v = period_integral(1.0).value;
  EXPECT_GE(v, kTwoPi / std::sqrt(3.0));
  EXPECT_LE(v, kTwoPi);
}

TEST(PeriodIntegral, GrowsLogarithmically) {
  for (double sign : {1.0, -1.0}) {
    double prev = kInf;
    for (int k : {2, 4, 6, 8}) {
      const double h = sign * std::pow(10.0, -k);
      const auto r = period_integral(h);
      ASSERT_TRUE(r.converged);
      const double ratio = r.value / std::log(1.0 / std::abs(h));
      EXPECT_LE(ratio, 6.0);
      EXPECT_LE(ratio, prev * 1.1);
      prev = ratio;
    }
  }
}

TEST(PeriodIntegral, NegativeBranchAgainstMidpointRule) {
  // Smooth case away from the singular set: |h| = 1 puts the zero of
  // cos s + 1 + h at s = pi only.
  const double h = -0.5;
  const double oracle = 2.0 * midpoint([h](double s) { return 1.0 / std::sqrt(std::abs(std::cos(s) + 1.0 + h)); },
                                       0.0, 2.0 * kPi / 3.0, 400000) +
                        2.0 * midpoint([h](double s) { return 1.0 / std::sqrt(std::abs(std::cos(s) + 1.0 + h)); },
                                       2.0 * kPi / 3.0, kPi, 400000);
  EXPECT_NEAR(period_integral(h).value, oracle, 5e-3 * oracle);
}

TEST(OscillationPeriod, SmallAmplitudeAndEllipticForm) {
  const double E = 1.0 - std::cos(1e-3);
  EXPECT_NEAR(oscillation_period(E).value, 4.0 * agm_K(std::sin(5e-4)), 1e-10);
  for (double X : {1.0, 2.0, 3.0}) {
    const double oracle = 4.0 * agm_K(std::sin(0.5 * X));
    EXPECT_NEAR(oscillation_period(1.0 - std::cos(X)).value, oracle, 1e-9 * oracle);
  }
}

TEST(RotationTime, LargeEnergyLeadingTerm) {
  const double lead = kTwoPi / std::sqrt(2.0 * 200.0);
  EXPECT_NEAR(rotation_time(200.0).value, lead, 0.02 * lead);
  // Exact form: 2 K(k) / sqrt(E/2) with k^2 = 2/E.
  const double E = 3.0;
  EXPECT_NEAR(rotation_time(E).value, 2.0 * agm_K(std::sqrt(2.0 / E)) / std::sqrt(0.5 * E), 1e-9);
}

TEST(TauMinus, SmallEnergyLinearLaw) {
  const double E = 1e-4;
  EXPECT_NEAR(tau_minus(E).value / (kPi * std::sqrt(0.5 * E)), 1.0, 1e-2);
}

TEST(TauMinus, StrictlyIncreasing) {
  double prev = 0.0;
  for (double E : {0.01, 0.3, 1.0, 1.7, 1.99, 2.0}) {
    const double v = tau_minus(E).value;
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(TauMinus, SeparatrixValueIsTheLimitFromBelow) {
  const double at2 = tau_minus(2.0).value;
  double prev_gap = kInf;
  for (int k = 2; k <= 6; ++k) {
    const double gap = at2 - tau_minus(2.0 - std::pow(10.0, -k)).value;
    EXPECT_GT(gap, 0.0);
    EXPECT_LT(gap, prev_gap);
    prev_gap = gap;
  }
  EXPECT_LT(prev_gap, 1e-4);
}

TEST(TauMinus, AgainstEllipticOracle) {
  // tau-(E) = integral over [0, Phi] of (sin x / x) K(sin(x/2)).
  const double E = 1.0;
  const double Phi = std::acos(1.0 - E);
  const double oracle = midpoint([](double x) { return std::sin(x) / x * agm_K(std::sin(0.5 * x)); }, 0.0, Phi, 200000);
  EXPECT_NEAR(tau_minus(E).value, oracle, 1e-8);
}

TEST(TauPlus, ZeroAtSeparatrixAndIncreasing) {
  EXPECT_EQ(tau_plus(2.0).value, 0.0);
  double prev = 0.0;
  for (double E : {2.1, 2.5, 3.0, 10.0}) {
    const double v = tau_plus(E).value;
    EXPECT_GT(v, prev);
    prev = v;
  }
}

TEST(TauPlus, AgainstEllipticOracle) {
  // tau+(E) = (1/(2 pi)) * integral over [2, E] of the rotation time.
  const double E = 3.0;
  const double oracle =
      midpoint([](double e) { return 2.0 * agm_K(std::sqrt(2.0 / e)) / std::sqrt(0.5 * e); }, 2.0 + 1e-12, E, 400000) /
      kTwoPi;
  EXPECT_NEAR(tau_plus(E).value, oracle, 2e-4);
}

TEST(Tau, BranchSelection) {
  EXPECT_EQ(tau(1.0).value, tau_minus(1.0).value);
  EXPECT_NEAR(tau(3.0).value, tau_plus(3.0).value + tau_minus(2.0).value, 1e-14);
  EXPECT_EQ(tau(2.0).value, tau_minus(2.0).value + tau_plus(2.0).value);
}

TEST(PoincareHigh, ClosedForm) {
  EXPECT_NEAR(poincare_high(3.0, Params(0.1)), std::sqrt(9.0 - 0.4 * kPi), 1e-14);
  EXPECT_NEAR(poincare_high(3.0, Params(0.1)), 2.78270, 1e-4);
  EXPECT_NEAR(poincare_high(-3.0, Params(1e-12)), -3.0, 1e-11);
  EXPECT_THROW(poincare_high(0.1, Params(0.1)), std::domain_error);
}

TEST(PoincareLow, RootSatisfiesEnergyBalance) {
  const Params p(0.05);
  for (double x : {0.5, 1.5, 3.0}) {
    const auto xn = poincare_low(x, p);
    ASSERT_TRUE(xn.has_value());
    EXPECT_LT(*xn, x);
    EXPECT_NEAR(std::cos(*xn) - std::cos(x), 0.05 * (x + *xn), 1e-12);
  }
  EXPECT_NEAR(*poincare_low(1.0, Params(1e-12)), 1.0, 1e-9);
  EXPECT_FALSE(poincare_low(0.05, p).has_value());
}

TEST(PoincareLow, LinearizedStep) {
  const double eps = 1e-3, x = 2.0;
  const double step = x - *poincare_low(x, Params(eps));
  const double lin = 2.0 * eps * x / std::sin(x);
  EXPECT_NEAR(step, lin, 0.05 * lin);
}

TEST(PoincareLow, IterateCountTracksHalfSineIntegral) {
  const auto it = iterate_poincare_low(3.0, Params(1e-3), false);
  const double count = static_cast<double>(it.section.size() - 1) * 1e-3;
  const double oracle = half_si(3.0);
  EXPECT_NEAR(count, oracle, 0.05 * oracle);
  EXPECT_TRUE(it.exhausted);
}

TEST(PoincareIterates, StepTimesMatchHalfPeriods) {
  const Params p(0.02);
  const auto it = iterate_poincare_low(2.0, p);
  ASSERT_GE(it.step_times.size(), 3u);
  // A half swing between amplitudes x and x' lasts about half the free period at the mean energy.
  const double xm = 0.5 * (it.section[0] + it.section[1]);
  const double half = 2.0 * agm_K(std::sin(0.5 * xm));
  EXPECT_NEAR(it.step_times[0], half, 0.02 * half);

  const auto hi = iterate_poincare_high(3.0, p);
  ASSERT_GE(hi.section.size(), 2u);
  EXPECT_NEAR(hi.section[1], poincare_high(3.0, p), 1e-14);
  for (double h : hi.reduced) EXPECT_GT(h, 0.0);
}

TEST(LimitOde, LowZoneFromPiTakesD) {
  const auto path = limit_ode_solve(LimitZone::Low, kPi, {{kInf, -1.0}}, 0.01);
  EXPECT_TRUE(path.reached_target);
  EXPECT_NEAR(path.total_time, 0.925968526, 1e-8);
  EXPECT_NEAR(path.total_time, half_si(kPi), 1e-12);
  EXPECT_NEAR(path.value.back(), 0.0, 1e-12);
}

TEST(LimitOde, HighZoneClosedForm) {
  const auto path = limit_ode_solve(LimitZone::High, 2.0, {{kInf, -1.0}}, 0.01);
  EXPECT_TRUE(path.reached_target);
  EXPECT_NEAR(path.total_time, 1.0 / kPi, 1e-12);
}

TEST(LimitOde, ZeroControlKeepsThePathConstant) {
  const auto path = limit_ode_solve(LimitZone::Low, 2.0, {{1.0, 0.0}}, 0.1);
  EXPECT_FALSE(path.reached_target);
  for (double v : path.value) EXPECT_NEAR(v, 2.0, 1e-14);
  EXPECT_THROW(limit_ode_solve(LimitZone::Low, 2.0, {{1.0, 2.0}}, 0.1), std::invalid_argument);
}

TEST(CostFunctional, NormalizationAgainstTau) {
  const double X0 = 2.0;
  const double E = 1.0 - std::cos(X0);
  const auto low = limit_ode_solve(LimitZone::Low, X0, {{kInf, -1.0}}, 0.01);
  EXPECT_NEAR(cost_functional(low).value, tau_minus(E).value / std::sqrt(2.0), 1e-8);

  const auto high = limit_ode_solve(LimitZone::High, 2.0, {{kInf, -1.0}}, 0.01);
  EXPECT_NEAR(cost_functional(high).value, std::sqrt(2.0) * tau_plus(4.0).value, 1e-7);
}

TEST(CostFunctional, ZeroLengthAndMonotone) {
  const auto empty = limit_ode_solve(LimitZone::Low, 2.0, {{0.0, -1.0}}, 0.1);
  EXPECT_EQ(cost_functional(empty).value, 0.0);
  const auto shorter = limit_ode_solve(LimitZone::Low, 2.0, {{0.2, -1.0}}, 0.01);
  const auto longer = limit_ode_solve(LimitZone::Low, 2.0, {{0.4, -1.0}}, 0.01);
  EXPECT_LT(cost_functional(shorter).value, cost_functional(longer).value);
}

TEST(EulerConvergence, FirstOrderDecay) {
  const auto rows = euler_convergence(3.0, {0.02, 0.01, 0.005, 0.0025});
  ASSERT_EQ(rows.size(), 4u);
  EXPECT_TRUE(std::isnan(rows[0].ratio));
  for (std::size_t i = 1; i < rows.size(); ++i) {
    EXPECT_LE(rows[i].ratio, 0.75);
    EXPECT_LT(rows[i].sup_error, rows[i - 1].sup_error);
  }
  EXPECT_LT(rows.back().sup_error, 0.02);
}

TEST(EulerConvergence, TinyAmplitudeIsAtRest) {
  for (const auto& r : euler_convergence(1e-7, {0.02, 0.01})) EXPECT_LT(r.sup_error, 1e-6);
}
