#include <gtest/gtest.h>

#include <cmath>
#include <stdexcept>

#include "pendamp/dynamics.hpp"

using namespace pendamp;

TEST(Params, RejectsNonPositiveEpsilon) {
  EXPECT_THROW(Params(0.0), std::invalid_argument);
  EXPECT_THROW(Params(-0.1), std::invalid_argument);
  EXPECT_THROW(Params(NAN), std::invalid_argument);
  EXPECT_DOUBLE_EQ(Params(0.3).epsilon(), 0.3);
}

TEST(VectorField, PointValues) {
  auto r = vector_field({0.0, 0.0}, 0.0, Params(0.1));
  EXPECT_EQ(r.dx, 0.0);
  EXPECT_EQ(r.dy, 0.0);

  r = vector_field({kPi, 0.0}, 1.0, Params(0.1));
  EXPECT_EQ(r.dx, 0.0);
  EXPECT_NEAR(r.dy, 0.1, 1e-15);

  r = vector_field({kPi / 2, 2.0}, -1.0, Params(0.3));
  EXPECT_DOUBLE_EQ(r.dx, 2.0);
  EXPECT_NEAR(r.dy, -1.3, 1e-15);
}

TEST(VectorField, RejectsControlOutsideUnitInterval) {
  EXPECT_THROW(vector_field({0.0, 0.0}, 1.5, Params(0.1)), std::domain_error);
  EXPECT_NO_THROW(vector_field({0.0, 0.0}, -1.0, Params(0.1)));
}

TEST(Energy, PointValues) {
  EXPECT_EQ(energy({0.0, 0.0}), 0.0);
  EXPECT_DOUBLE_EQ(energy({kPi, 0.0}), 2.0);
  EXPECT_NEAR(energy({kPi / 2, 1.0}), 1.5, 1e-15);
}

TEST(Energy, InvariantUnderFullTurns) {
  for (int k = -3; k <= 3; ++k) {
    EXPECT_NEAR(energy({0.7 + k * kTwoPi, 0.4}), energy({0.7, 0.4}), 1e-13);
  }
}

TEST(ControlledHamiltonian, PointValues) {
  EXPECT_EQ(controlled_hamiltonian({0.0, 0.0}, 1, Params(0.2)), 0.0);
  // The torque eps*u enters the potential as -eps*u*x.
  EXPECT_NEAR(controlled_hamiltonian({kPi, 0.0}, -1, Params(0.1)), 2.0 + 0.1 * kPi, 1e-14);
  EXPECT_NEAR(controlled_hamiltonian({1.0, 1.0}, 1, Params(0.5)), 0.5 + 1.0 - std::cos(1.0) - 0.5,
              1e-14);
}

TEST(ControlledHamiltonian, ConstantAlongExactFlowDerivative) {
  // d/dt H = y * (dH/dx) + dy/dt * y must vanish for the constant-u field.
  const Params p(0.3);
  for (int u : {-1, 1}) {
    for (double x : {-2.0, 0.4, 2.9}) {
      const PhaseState s{x, 0.8};
      const auto f = vector_field(s, u, p);
      const double h = 1e-6;
      const double dHdx = (controlled_hamiltonian({x + h, s.y}, u, p) -
                           controlled_hamiltonian({x - h, s.y}, u, p)) / (2 * h);
      const double dHdy = s.y;
      EXPECT_NEAR(dHdx * f.dx + dHdy * f.dy, 0.0, 1e-8);
    }
  }
}

TEST(StandstillZone, Classification) {
  const Params p(0.1);
  EXPECT_EQ(standstill_zone({0.0, 0.0}, p), ZoneTag::Lower);
  EXPECT_EQ(standstill_zone({kPi, 0.0}, p), ZoneTag::Upper);
  EXPECT_EQ(standstill_zone({kPi / 2, 0.0}, p), ZoneTag::None);
  EXPECT_EQ(standstill_zone({0.0, 0.25}, p), ZoneTag::None);
  EXPECT_EQ(standstill_zone({kTwoPi + 0.05, -0.1}, p), ZoneTag::Lower);
  EXPECT_EQ(standstill_zone({0.0, 0.25}, p, 3.0), ZoneTag::Lower);
}

TEST(StandstillZone, RequiresZoneSmallerThanUnity) {
  EXPECT_THROW(standstill_zone({0.0, 0.0}, Params(0.5)), std::invalid_argument);
}

TEST(ReduceAngle, MapsIntoHalfOpenInterval) {
  EXPECT_NEAR(reduce_angle(3 * kPi + 0.1), -kPi + 0.1, 1e-12);
  EXPECT_NEAR(reduce_angle(-0.2), -0.2, 1e-15);
  const double r = reduce_angle(kPi);
  EXPECT_GE(r, -kPi);
  EXPECT_LT(r, kPi);
}

TEST(AmplitudeForEnergy, InvertsPotential) {
  for (double E : {0.0, 1e-6, 0.5, 1.0, 1.9, 2.0}) {
    EXPECT_NEAR(1.0 - std::cos(amplitude_for_energy(E)), E, 1e-13);
  }
  EXPECT_THROW(amplitude_for_energy(2.5), std::domain_error);
}
