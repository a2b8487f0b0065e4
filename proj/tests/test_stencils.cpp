#include <gtest/gtest.h>

#include <cmath>

#include "parastencil/stencils.hpp"
#include "support/oracles.hpp"

using namespace parastencil;

namespace {

StencilCoeffs coeffs(std::array<double, 3> c, double nu, const GridSpec& g) { return {c, nu, g.dx()}; }

Field3 spike(const GridSpec& g) {
  Field3 f(g);
  f(g.nx() / 2, g.ny() / 2, g.nz() / 2) = 1.0;
  return f;
}

}  // namespace

TEST(StencilCoeffs, Validation) {
  EXPECT_THROW((StencilCoeffs{{0, 0, 0}, -1.0, 0.1}.validate()), std::invalid_argument);
  EXPECT_THROW((StencilCoeffs{{0, 0, 0}, 1.0, 0.0}.validate()), std::invalid_argument);
  EXPECT_NO_THROW((StencilCoeffs{{1, -1, 0}, 0.0, 0.1}.validate()));
}

TEST(RhsCoarse, ConstantFieldGivesZero) {
  const GridSpec g = GridSpec::cube(6);
  const Field3 out = rhs_coarse(Field3(g, 4.25), coeffs({1, -2, 0.5}, 0.3, g));
  EXPECT_EQ(inf_norm(out), 0.0);
}

TEST(RhsCoarse, SpikeDiffusionOnly) {
  const GridSpec g = GridSpec::cube(8);
  const double h = g.dx();
  const Field3 out = rhs_coarse(spike(g), coeffs({0, 0, 0}, 1.0, g));
  EXPECT_DOUBLE_EQ(out(4, 4, 4), -6.0 / (h * h));
  EXPECT_DOUBLE_EQ(out(5, 4, 4), 1.0 / (h * h));
  EXPECT_DOUBLE_EQ(out(4, 3, 4), 1.0 / (h * h));
  EXPECT_DOUBLE_EQ(out(4, 4, 5), 1.0 / (h * h));
  EXPECT_EQ(out(6, 4, 4), 0.0);
}

TEST(RhsCoarse, UpwindSpikePicksTheUpstreamSide) {
  const GridSpec g = GridSpec::cube(8);
  const double h = g.dx();
  const Field3 pos = rhs_coarse(spike(g), coeffs({1, 0, 0}, 0.0, g));
  EXPECT_DOUBLE_EQ(pos(4, 4, 4), -1.0 / h);
  EXPECT_DOUBLE_EQ(pos(5, 4, 4), 1.0 / h);
  EXPECT_EQ(pos(3, 4, 4), 0.0);
  const Field3 neg = rhs_coarse(spike(g), coeffs({-1, 0, 0}, 0.0, g));
  EXPECT_DOUBLE_EQ(neg(4, 4, 4), -1.0 / h);
  EXPECT_DOUBLE_EQ(neg(3, 4, 4), 1.0 / h);
  EXPECT_EQ(neg(5, 4, 4), 0.0);
}

TEST(RhsCoarse, QuadraticProfileHasExactSecondDifference) {
  // x^2 is not periodic, so check only points away from the wrap
  const GridSpec g(16, 1, 1);
  const double h = g.dx();
  Field3 u(g);
  u.fill_interior([&](int i, int, int) { return (i * h) * (i * h); });
  const Field3 out = rhs_coarse(u, coeffs({0, 0, 0}, 1.0, g));
  for (int i = 2; i < 14; ++i) EXPECT_NEAR(out(i, 0, 0), 2.0, 1e-9);
}

TEST(RhsFine, ConstantAndQuarticExactness) {
  const GridSpec g = GridSpec::cube(6);
  EXPECT_EQ(inf_norm(rhs_fine(Field3(g, -1.5), coeffs({1, 1, 1}, 0.2, g))), 0.0);

  const GridSpec line(32, 1, 1);
  const double h = line.dx();
  Field3 u(line);
  u.fill_interior([&](int i, int, int) { return std::pow(i * h, 4); });
  // lap4 and grad4 are exact on quartics
  const Field3 lap = rhs_fine(u, coeffs({0, 0, 0}, 1.0, line));
  const Field3 adv = rhs_fine(u, coeffs({-1, 0, 0}, 0.0, line));
  for (int i = 3; i < 29; ++i) {
    const double x = i * h;
    EXPECT_NEAR(lap(i, 0, 0), 12.0 * x * x, 1e-7);
    EXPECT_NEAR(adv(i, 0, 0), 4.0 * x * x * x, 1e-9);
  }
}

TEST(RhsFine, SpikeWeights) {
  const GridSpec g = GridSpec::cube(8);
  const double h = g.dx();
  const Field3 out = rhs_fine(spike(g), coeffs({0, 0, 0}, 1.0, g));
  EXPECT_DOUBLE_EQ(out(4, 4, 4), 3.0 * -30.0 / (12.0 * h * h));
  EXPECT_DOUBLE_EQ(out(5, 4, 4), 16.0 / (12.0 * h * h));
  EXPECT_DOUBLE_EQ(out(4, 4, 2), -1.0 / (12.0 * h * h));
}

TEST(Stencils, MatchModularOracleOnRandomFields) {
  const GridSpec g(7, 5, 6);
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const Field3 u = oracle::random_field(g, seed);
    const std::array<double, 3> c{0.7, -1.3, seed % 2 ? 0.0 : 2.0};
    const double nu = 0.05 * (seed + 1);
    const StencilCoeffs s = coeffs(c, nu, g);
    const Field3 rc = rhs_coarse(u, s), rf = rhs_fine(u, s);
    const Field3 oc = oracle::naive_rhs_coarse(u, c, nu), of = oracle::naive_rhs_fine(u, c, nu);
    EXPECT_LE(inf_norm_diff(rc, oc), 1e-12 * inf_norm(oc));
    EXPECT_LE(inf_norm_diff(rf, of), 1e-12 * inf_norm(of));
  }
}

TEST(Stencils, SineModeOrderOfAccuracy) {
  // relative error of the operator applied to sin(2 pi x) against the exact derivative
  auto err = [](bool fine, bool advect, int n) {
    const GridSpec g(n, 1, 1);
    const double k = 2.0 * oracle::kPi;
    Field3 u(g);
    u.fill_interior([&](int i, int, int) { return std::sin(k * i * g.dx()); });
    const StencilCoeffs s = advect ? coeffs({1, 0, 0}, 0.0, g) : coeffs({0, 0, 0}, 1.0, g);
    const Field3 out = fine ? rhs_fine(u, s) : rhs_coarse(u, s);
    Field3 exact(g);
    exact.fill_interior([&](int i, int, int) {
      const double x = i * g.dx();
      return advect ? -k * std::cos(k * x) : -k * k * std::sin(k * x);
    });
    return oracle::rel_diff(out, exact);
  };
  EXPECT_NEAR(oracle::observed_order(err(false, false, 32), err(false, false, 64)), 2.0, 0.05);
  EXPECT_NEAR(oracle::observed_order(err(false, true, 32), err(false, true, 64)), 1.0, 0.05);
  EXPECT_NEAR(oracle::observed_order(err(true, false, 32), err(true, false, 64)), 4.0, 0.05);
  EXPECT_NEAR(oracle::observed_order(err(true, true, 32), err(true, true, 64)), 4.0, 0.05);
}

TEST(Stencils, SumOfRhsVanishes) {
  const GridSpec g(6, 7, 5);
  const Field3 u = oracle::random_field(g, 42);
  const StencilCoeffs s = coeffs({1.1, -0.4, 0.9}, 0.3, g);
  const Field3 rc = rhs_coarse(u, s), rf = rhs_fine(u, s);
  const double scale = inf_norm(rc) * g.interior_size();
  EXPECT_LE(std::abs(mean(rc)) * g.interior_size(), 1e-13 * scale);
  EXPECT_LE(std::abs(mean(rf)) * g.interior_size(), 1e-13 * inf_norm(rf) * g.interior_size());
}

TEST(Stencils, Linearity) {
  const GridSpec g = GridSpec::cube(6);
  const Field3 u = oracle::random_field(g, 1), v = oracle::random_field(g, 2);
  const StencilCoeffs s = coeffs({0.5, 1.0, -1.0}, 0.2, g);
  const Field3 lhs = rhs_fine(axpy3(2.0, u, -3.0, v, 0.0, v), s);
  const Field3 rhs = axpy3(2.0, rhs_fine(u, s), -3.0, rhs_fine(v, s), 0.0, v);
  EXPECT_LE(inf_norm_diff(lhs, rhs), 1e-12 * inf_norm(rhs));
  const Field3 lc = rhs_coarse(axpy3(2.0, u, -3.0, v, 0.0, v), s);
  const Field3 rc = axpy3(2.0, rhs_coarse(u, s), -3.0, rhs_coarse(v, s), 0.0, v);
  EXPECT_LE(inf_norm_diff(lc, rc), 1e-12 * inf_norm(rc));
}

TEST(Stencils, MirrorSymmetryFlipsVelocity) {
  const GridSpec g(8, 1, 1);
  const Field3 u = oracle::random_field(g, 9);
  Field3 m(g);
  m.fill_interior([&](int i, int, int) { return oracle::periodic(u, -i, 0, 0); });
  const Field3 a = rhs_coarse(u, coeffs({1, 0, 0}, 0.1, g));
  const Field3 b = rhs_coarse(m, coeffs({-1, 0, 0}, 0.1, g));
  for (int i = 0; i < 8; ++i) EXPECT_NEAR(b(oracle::wrap(-i, 8), 0, 0), a(i, 0, 0), 1e-12);
}

TEST(Stencils, ThreadCountDoesNotChangeBits) {
  const GridSpec g(9, 7, 11);
  Field3 u = oracle::random_field(g, 5);
  const StencilCoeffs s = coeffs({1, 1, 1}, 0.1, g);
  Field3 ref_c(g), ref_f(g);
  rhs_coarse(u, s, ref_c);
  rhs_fine(u, s, ref_f);
  for (int lanes : {2, 3, 8}) {
    Executor ex(lanes);
    Field3 oc(g), of(g);
    rhs_coarse(u, s, oc, ex);
    rhs_fine(u, s, of, ex);
    EXPECT_TRUE(oc.interior_equals(ref_c)) << lanes;
    EXPECT_TRUE(of.interior_equals(ref_f)) << lanes;
  }
}

TEST(ApplyParallel, LaplacianKernelMatchesRhs) {
  const GridSpec g = GridSpec::cube(6);
  Field3 u = oracle::random_field(g, 3);
  halo_exchange(u);
  const std::ptrdiff_t sj = g.stride_j(), sk = g.stride_k();
  const double inv = 1.0 / (g.dx() * g.dx());
  Executor ex(3);
  Field3 out(g);
  apply_parallel(
      ex, out,
      [&](std::size_t i, const double* q) {
        return inv * (q[i + 1] + q[i - 1] + q[i + sj] + q[i - sj] + q[i + sk] + q[i - sk] - 6.0 * q[i]);
      },
      u);
  const Field3 ref = oracle::naive_rhs_coarse(u, {0, 0, 0}, 1.0);
  EXPECT_LE(inf_norm_diff(out, ref), 1e-12 * inf_norm(ref));
}

TEST(ApplyParallel, RejectsAliasingAndMismatch) {
  Field3 u(GridSpec::cube(4)), v(GridSpec::cube(5));
  Executor& ex = Executor::serial();
  EXPECT_THROW(apply_parallel(ex, u, [](std::size_t, const double*) { return 0.0; }, u), std::invalid_argument);
  EXPECT_THROW(apply_parallel(ex, u, [](std::size_t, const double*) { return 0.0; }, v), ShapeError);
}

TEST(Stencils, ReportedFailuresForBadInputs) {
  Field3 u(GridSpec::cube(4)), out(GridSpec::cube(5));
  const StencilCoeffs s = coeffs({1, 1, 1}, 0.1, u.spec());
  EXPECT_THROW(rhs_coarse(u, s, out), ShapeError);
  Field3 thin(GridSpec(4, 4, 4, 1)), thin_out(GridSpec(4, 4, 4, 1));
  EXPECT_THROW(rhs_fine(thin, s, thin_out), ShapeError);
  EXPECT_NO_THROW(rhs_coarse(thin, s, thin_out));
}
