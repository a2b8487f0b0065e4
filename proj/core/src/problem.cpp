#include "parastencil/problem.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace parastencil {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr double kDecayRate = 12.0 * std::numbers::pi * std::numbers::pi;

double wrap_unit(double x) {
  double r = std::fmod(x, 1.0);
  if (r < 0.0) r += 1.0;
  return r;
}

}  // namespace

double ProblemSpec::nu(double t) const { return nu0 + 0.5 * nu0 * std::sin(omega * t); }

StencilCoeffs ProblemSpec::coeffs(double t) const { return {c, nu(t), grid.dx()}; }

void ProblemSpec::validate() const {
  if (!(nu0 > 0.0)) throw std::invalid_argument("nu0 must be > 0");
  if (!(T > 0.0)) throw std::invalid_argument("end time T must be > 0");
  if (fine_steps < 1 || coarse_steps < 1) throw std::invalid_argument("step counts must be >= 1");
  if (fine_steps < coarse_steps)
    throw std::invalid_argument("fine step must not exceed coarse step (fine_steps >= coarse_steps)");
  for (double v : c)
    if (!std::isfinite(v)) throw std::invalid_argument("velocity must be finite");
  if (!std::isfinite(omega)) throw std::invalid_argument("omega must be finite");
}

ProblemSpec ProblemSpec::desk(double omega) {
  ProblemSpec p;
  p.omega = omega;
  return p;
}

ProblemSpec ProblemSpec::reference_scale(double omega) {
  ProblemSpec p;
  p.omega = omega;
  p.grid = GridSpec::cube(128);
  p.fine_steps = 1 << 15;
  p.coarse_steps = 1 << 11;
  return p;
}

Field3 initial_condition(const GridSpec& grid) {
  Field3 u(grid);
  const double dx = grid.dx();
  std::vector<double> sx(grid.nx()), sy(grid.ny()), sz(grid.nz());
  for (int i = 0; i < grid.nx(); ++i) sx[i] = std::sin(kTwoPi * i * dx);
  for (int j = 0; j < grid.ny(); ++j) sy[j] = std::sin(kTwoPi * j * dx);
  for (int k = 0; k < grid.nz(); ++k) sz[k] = std::sin(kTwoPi * k * dx);
  u.fill_interior([&](int i, int j, int k) { return sx[i] * sy[j] * sz[k]; });
  return u;
}

double amplitude(double t, double nu0, double omega) {
  if (t < 0.0) throw std::invalid_argument("amplitude: t must be >= 0");
  double integral = nu0 * t;
  if (omega != 0.0) {
    // 1 - cos(wt) written as 2 sin^2(wt/2) to avoid cancellation for small wt
    const double s = std::sin(0.5 * omega * t);
    integral += nu0 / (2.0 * omega) * 2.0 * s * s;
  }
  return std::exp(-kDecayRate * integral);
}

Field3 exact_solution(const GridSpec& grid, double t, const ProblemSpec& p) {
  Field3 u(grid);
  const double dx = grid.dx();
  const double a = amplitude(t, p.nu0, p.omega);
  auto axis = [&](int n, double c) {
    std::vector<double> v(n);
    for (int i = 0; i < n; ++i) v[i] = std::sin(kTwoPi * wrap_unit(i * dx - c * t));
    return v;
  };
  const auto sx = axis(grid.nx(), p.c[0]);
  const auto sy = axis(grid.ny(), p.c[1]);
  const auto sz = axis(grid.nz(), p.c[2]);
  u.fill_interior([&](int i, int j, int k) { return a * sx[i] * sy[j] * sz[k]; });
  return u;
}

double relative_error(const Field3& u, double t, const ProblemSpec& p) {
  const Field3 exact = exact_solution(u.spec(), t, p);
  const double ref = inf_norm(exact);
  if (ref == 0.0) throw std::domain_error("exact solution vanishes; relative error undefined");
  return inf_norm_diff(u, exact) / ref;
}

bool ConvergenceReport::satisfies_triangle_bound(double slack) const {
  if (defects.empty()) return false;
  return eps_parareal <= defects.back() * fine_to_exact_norm_ratio + eps_fine + slack;
}

}  // namespace parastencil
