#include <gtest/gtest.h>

#include <cmath>

#include "parastencil/problem.hpp"
#include "support/oracles.hpp"

using namespace parastencil;

TEST(ProblemSpec, DefaultsAndDerivedSteps) {
  const ProblemSpec p = ProblemSpec::desk(100.0);
  EXPECT_EQ(p.grid, GridSpec::cube(32));
  EXPECT_EQ(p.fine_steps, 2048);
  EXPECT_EQ(p.coarse_steps * 16, p.fine_steps);
  EXPECT_DOUBLE_EQ(p.dt_fine() * p.fine_steps, p.T);
  EXPECT_EQ(p.omega, 100.0);
  const ProblemSpec r = ProblemSpec::reference_scale();
  EXPECT_EQ(r.grid.nx(), 128);
  EXPECT_EQ(r.fine_steps, 1 << 15);
  EXPECT_EQ(r.coarse_steps, 1 << 11);
}

TEST(ProblemSpec, Validation) {
  ProblemSpec p;
  EXPECT_NO_THROW(p.validate());
  p.nu0 = 0.0;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.T = -1;
  EXPECT_THROW(p.validate(), std::invalid_argument);
  p = {};
  p.fine_steps = 8;
  p.coarse_steps = 16;
  EXPECT_THROW(p.validate(), std::invalid_argument);
}

TEST(ProblemSpec, ViscosityProfile) {
  ProblemSpec p;
  p.nu0 = 0.1;
  p.omega = 100.0;
  EXPECT_EQ(p.nu(0.0), 0.1);
  EXPECT_NEAR(p.nu(oracle::kPi / 200.0), 0.15, 1e-15);
  EXPECT_NEAR(p.nu(3.0 * oracle::kPi / 200.0), 0.05, 1e-15);
}

TEST(Amplitude, MatchesOdeOracle) {
  for (double omega : {0.0, 100.0}) {
    for (int m = 1; m <= 20; ++m) {
      const double t = 0.1 * m / 20;
      const double ref = oracle::ode_amplitude(t, 0.1, omega, 4000);
      EXPECT_NEAR(amplitude(t, 0.1, omega), ref, 1e-10 * ref) << omega << " " << t;
    }
  }
}

TEST(Amplitude, ClosedFormEdgeCases) {
  EXPECT_EQ(amplitude(0.0, 0.1, 100.0), 1.0);
  EXPECT_NEAR(amplitude(0.1, 0.1, 0.0), std::exp(-12.0 * oracle::kPi * oracle::kPi * 0.01), 1e-15);
  // period 2 pi / omega: the oscillating part integrates to zero
  const double period = 2.0 * oracle::kPi / 100.0;
  EXPECT_NEAR(amplitude(period, 0.1, 100.0), amplitude(period, 0.1, 0.0), 1e-14);
  EXPECT_NEAR(amplitude(1e-9, 0.1, 1e-3), amplitude(1e-9, 0.1, 0.0), 1e-15);
  EXPECT_THROW(amplitude(-1.0, 0.1, 0.0), std::invalid_argument);
}

TEST(ExactSolution, InitialConditionAndShift) {
  const ProblemSpec p = ProblemSpec::desk(0.0);
  const GridSpec g = GridSpec::cube(8);
  const Field3 u0 = initial_condition(g);
  EXPECT_LE(inf_norm_diff(exact_solution(g, 0.0, p), u0), 1e-15);
  EXPECT_EQ(u0(0, 3, 5), 0.0);
  EXPECT_NEAR(u0(2, 2, 2), 1.0, 1e-15);
  // after one grid cell of travel along (1,1,1), the pattern has moved by one index
  const double t = g.dx();
  const Field3 e = exact_solution(g, t, p);
  const double a = amplitude(t, p.nu0, p.omega);
  for (int k = 0; k < 8; ++k)
    for (int j = 0; j < 8; ++j)
      for (int i = 0; i < 8; ++i) ASSERT_NEAR(e(i, j, k), a * oracle::periodic(u0, i - 1, j - 1, k - 1), 1e-14);
}

TEST(ExactSolution, RelativeErrorOfExactIsZero) {
  const ProblemSpec p = ProblemSpec::desk(100.0);
  const GridSpec g = GridSpec::cube(8);
  EXPECT_EQ(relative_error(exact_solution(g, 0.05, p), 0.05, p), 0.0);
}

TEST(ConvergenceReport, TriangleBound) {
  ConvergenceReport r;
  EXPECT_FALSE(r.satisfies_triangle_bound());
  r.defects = {0.1, 0.01};
  r.eps_fine = 1e-3;
  r.eps_parareal = 0.0105;
  EXPECT_TRUE(r.satisfies_triangle_bound());
  r.eps_parareal = 0.02;
  EXPECT_FALSE(r.satisfies_triangle_bound());
}
