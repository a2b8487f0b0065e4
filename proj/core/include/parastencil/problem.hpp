#pragma once

#include <array>
#include <vector>

#include "parastencil/grid.hpp"
#include "parastencil/stencils.hpp"

namespace parastencil {

/// Benchmark u_t + c.grad(u) = nu(t) lap(u) on the periodic unit cube with
/// nu(t) = nu0 + (nu0/2) sin(omega t) and u0 = sin(2 pi x) sin(2 pi y) sin(2 pi z).
/// Step sizes are stored as total step counts over [0, T] so that T/dt is an
/// integer by construction.
struct ProblemSpec {
  std::array<double, 3> c{1.0, 1.0, 1.0};
  double nu0 = 0.1;
  double omega = 0.0;
  double T = 0.1;
  GridSpec grid = GridSpec::cube(32);
  int fine_steps = 2048;
  int coarse_steps = 128;

  double dt_fine() const { return T / fine_steps; }
  double dt_coarse() const { return T / coarse_steps; }
  double nu(double t) const;
  StencilCoeffs coeffs(double t) const;

  void validate() const;

  /// 32^3, 2048 fine and 128 coarse steps: the large-scale step ratio 1:16 at
  /// a size that runs on a workstation.
  static ProblemSpec desk(double omega = 0.0);
  /// 128^3 with T/2^15 fine and T/2^11 coarse steps.
  static ProblemSpec reference_scale(double omega = 0.0);
};

/// u0 sampled at vertex coordinates x_i = i*dx.
Field3 initial_condition(const GridSpec& grid);

/// exp(-12 pi^2 * integral_0^t nu(s) ds) for the nu(t) profile above.
/// omega == 0 is the constant-coefficient limit.
double amplitude(double t, double nu0, double omega);

/// a(t) * u0(x - c t), the shifted coordinate wrapped into [0, 1).
Field3 exact_solution(const GridSpec& grid, double t, const ProblemSpec& p);

/// ||u - exact||_inf / ||exact||_inf.
double relative_error(const Field3& u, double t, const ProblemSpec& p);

struct ConvergenceReport {
  std::vector<double> defects;  // d^0 .. d^K
  double eps_fine = 0.0;
  double eps_coarse = 0.0;
  double eps_parareal = 0.0;
  double fine_to_exact_norm_ratio = 1.0;  // ||u_fine|| / ||u_exact||
  /// First k with d^k <= eps_fine, or -1 if never reached.
  int iterations_to_fine_accuracy = -1;

  /// eps_parareal <= d^K * ||u_fine||/||u_exact|| + eps_fine, up to slack.
  bool satisfies_triangle_bound(double slack = 1e-12) const;
};

}  // namespace parastencil
