#include <gtest/gtest.h>

#include <cmath>

#include "parastencil/parareal.hpp"
#include "support/oracles.hpp"

using namespace parastencil;

namespace {

PararealConfig small_config(int n_p, int k, double omega = 100.0) {
  PararealConfig c;
  c.n_slices = n_p;
  c.k_max = k;
  c.problem.grid = GridSpec::cube(8);
  c.problem.omega = omega;
  c.problem.fine_steps = 16 * 8;
  c.problem.coarse_steps = 8;
  return c;
}

}  // namespace

TEST(PararealConfig, ValidationAndSlices) {
  PararealConfig c = small_config(4, 2);
  EXPECT_NO_THROW(c.validate());
  EXPECT_EQ(c.fine_steps_per_slice(), 32);
  EXPECT_EQ(c.coarse_steps_per_slice(), 2);
  const SliceInterval s = c.slice(3, PropagatorKind::fine_rk4);
  EXPECT_EQ(s.t_end, c.problem.T);
  EXPECT_EQ(s.n_steps, 32);
  c.n_slices = 3;
  EXPECT_THROW(c.validate(), std::invalid_argument);
  c = small_config(4, 0);
  EXPECT_THROW(c.validate(), std::invalid_argument);
  EXPECT_FALSE(small_config(2, 1).effective_timeout().has_value());
  c = small_config(2, 1);
  c.transport = TransportKind::multi_process;
  EXPECT_EQ(c.effective_timeout(), std::chrono::milliseconds(60'000));
}

TEST(Parareal, InitialIterateIsTheSerialCoarseRun) {
  const PararealConfig c = small_config(4, 1);
  const PararealResult r = run_parareal(c);
  EXPECT_TRUE(r.final_iterates.front().interior_equals(run_serial_coarse(c).u));
}

TEST(Parareal, SingleSliceIsTheFinePropagatorAfterOneIteration) {
  const PararealConfig c = small_config(1, 3);
  const PararealResult r = run_parareal(c);
  const Field3 fine = run_serial_fine(c).u;
  EXPECT_LE(defect(r.final_iterates[1], fine), 1e-14);
  EXPECT_LE(defect(r.final_field(), fine), 1e-14);
}

TEST(Parareal, FiniteStepExactness) {
  for (int n_p : {2, 4, 8}) {
    const PararealConfig c = small_config(n_p, n_p);
    const PararealResult r = run_parareal(c);
    EXPECT_LE(defect(r.final_field(), run_serial_fine(c).u), 1e-12) << n_p;
  }
}

TEST(Parareal, CoarseEqualsFineConvergesInOneIteration) {
  PararealConfig c = small_config(4, 3);
  c.coarse_is_fine = true;
  c.problem.coarse_steps = c.problem.fine_steps;
  const PararealResult r = run_parareal(c);
  const Field3 fine = run_serial_fine(c).u;
  EXPECT_LE(defect(r.final_iterates[0], fine), 1e-12);
  for (int k = 1; k <= 3; ++k) EXPECT_LE(defect(r.final_iterates[k], fine), 1e-12);
}

TEST(Parareal, DefectsDecreaseUntilExact) {
  const PararealConfig c = small_config(8, 8);
  const PararealResult r = run_parareal(c);
  const Field3 fine = run_serial_fine(c).u;
  double prev = INFINITY;
  for (int k = 0; k < 8; ++k) {
    const double d = defect(r.final_iterates[k], fine);
    EXPECT_LT(d, prev) << k;
    prev = d;
  }
}

TEST(Parareal, MonitorsAreFilledPerRank) {
  const PararealConfig c = small_config(4, 3);
  const PararealResult r = run_parareal(c);
  ASSERT_EQ(r.ranks.size(), 4u);
  for (const auto& m : r.ranks) {
    EXPECT_EQ(m.iterations, 3);
    EXPECT_EQ(m.residuals.size(), 3u);
    EXPECT_EQ(m.iterate_changes.size(), 3u);
    EXPECT_GT(m.fine_seconds, 0.0);
  }
  // rank 0 is exact after its first iteration
  EXPECT_EQ(r.ranks[0].iterate_changes[1], 0.0);
  EXPECT_EQ(r.max_iterate_changes().size(), 3u);
  EXPECT_EQ(r.iterations(), 3);
}

TEST(Parareal, EarlyStopWithTolerance) {
  PararealConfig c = small_config(4, 8);
  c.stop_tolerance = 1e-13;
  const PararealResult r = run_parareal(c);
  EXPECT_LT(r.iterations(), 8);
  EXPECT_LE(defect(r.final_field(), run_serial_fine(c).u), 1e-12);
  for (std::size_t p = 1; p < r.ranks.size(); ++p) EXPECT_GE(r.ranks[p].iterations, r.ranks[p - 1].iterations);
}

TEST(Parareal, RepeatableAndThreadIndependent) {
  PararealConfig c = small_config(4, 3);
  const PararealResult a = run_parareal(c);
  const PararealResult b = run_parareal(c);
  c.threads_per_worker = 3;
  const PararealResult t = run_parareal(c);
  for (int k = 0; k <= 3; ++k) {
    EXPECT_TRUE(a.final_iterates[k].interior_equals(b.final_iterates[k]));
    EXPECT_TRUE(a.final_iterates[k].interior_equals(t.final_iterates[k]));
  }
}

TEST(Parareal, MultiProcessMatchesInProcessBitwise) {
  PararealConfig c = small_config(4, 3);
  const PararealResult in = run_parareal(c);
  c.transport = TransportKind::multi_process;
  const PararealResult mp = run_parareal(c);
  ASSERT_EQ(mp.final_iterates.size(), in.final_iterates.size());
  for (std::size_t k = 0; k < in.final_iterates.size(); ++k)
    EXPECT_TRUE(mp.final_iterates[k].interior_equals(in.final_iterates[k]));
  ASSERT_EQ(mp.ranks.size(), 4u);
  EXPECT_EQ(mp.ranks[3].residuals, in.ranks[3].residuals);
}

TEST(Parareal, ConvergenceReportTriangleBound) {
  const PararealConfig c = small_config(4, 2);
  const PararealResult r = run_parareal(c);
  const ConvergenceReport rep =
      make_convergence_report(r, run_serial_fine(c).u, run_serial_coarse(c).u, c.problem);
  EXPECT_EQ(rep.defects.size(), 3u);
  EXPECT_GT(rep.eps_coarse, rep.eps_fine);
  EXPECT_TRUE(rep.satisfies_triangle_bound(1e-12));
}

TEST(Parareal, DefectRequiresNonzeroReference) {
  const Field3 z(GridSpec::cube(4));
  EXPECT_THROW(defect(z, z), std::domain_error);
}

TEST(SliceWorker, RankZeroWithoutTransport) {
  PararealConfig c = small_config(1, 2);
  SliceWorker w(0, c, Executor::serial());
  w.init(initial_condition(c.problem.grid));
  const Field3 coarse0 = w.coarse_value();
  w.iterate(0, nullptr);
  // G(u0) is unchanged, so u_1^1 = F(u0)
  EXPECT_TRUE(w.coarse_value().interior_equals(coarse0));
  EXPECT_LE(inf_norm_diff(w.end_value(), w.fine_value()), 1e-15 * inf_norm(w.fine_value()));
  EXPECT_THROW(SliceWorker(5, c, Executor::serial()), std::out_of_range);
}

TEST(TransportKind, Names) {
  EXPECT_EQ(transport_from_string("in_process"), TransportKind::in_process);
  EXPECT_EQ(transport_from_string(to_string(TransportKind::multi_process)), TransportKind::multi_process);
  EXPECT_THROW(transport_from_string("mpi"), std::invalid_argument);
}
