#pragma once

// Reference computations for the tests. Nothing here calls the halo,
// stencil or propagator code it is used to check.

#include <cmath>
#include <complex>
#include <random>

#include "parastencil/grid.hpp"
#include "parastencil/problem.hpp"

namespace oracle {

using parastencil::Field3;
using parastencil::GridSpec;
using parastencil::ProblemSpec;

inline constexpr double kPi = 3.14159265358979323846;

inline int wrap(int i, int n) { return ((i % n) + n) % n; }

/// Interior value at a periodic image of (i,j,k), read without halos.
inline double periodic(const Field3& f, int i, int j, int k) {
  const GridSpec& g = f.spec();
  return f(wrap(i, g.nx()), wrap(j, g.ny()), wrap(k, g.nz()));
}

inline Field3 random_field(const GridSpec& g, std::uint64_t seed, double lo = -1.0, double hi = 1.0) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  Field3 f(g);
  f.fill_interior([&](int, int, int) { return dist(rng); });
  return f;
}

/// Coarse right-hand side by direct modular indexing.
inline Field3 naive_rhs_coarse(const Field3& u, const std::array<double, 3>& c, double nu) {
  const GridSpec& g = u.spec();
  const double h = g.dx();
  Field3 out(g);
  out.fill_interior([&](int i, int j, int k) {
    const double u0 = u(i, j, k);
    const double lap = (periodic(u, i + 1, j, k) + periodic(u, i - 1, j, k) + periodic(u, i, j + 1, k) +
                        periodic(u, i, j - 1, k) + periodic(u, i, j, k + 1) + periodic(u, i, j, k - 1) - 6.0 * u0) /
                       (h * h);
    double adv = 0.0;
    const int d[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (int a = 0; a < 3; ++a) {
      const double up = periodic(u, i + d[a][0], j + d[a][1], k + d[a][2]);
      const double dn = periodic(u, i - d[a][0], j - d[a][1], k - d[a][2]);
      adv += c[a] > 0 ? c[a] * (u0 - dn) / h : c[a] * (up - u0) / h;
    }
    return nu * lap - adv;
  });
  return out;
}

/// Fine right-hand side by direct modular indexing.
inline Field3 naive_rhs_fine(const Field3& u, const std::array<double, 3>& c, double nu) {
  const GridSpec& g = u.spec();
  const double h = g.dx();
  Field3 out(g);
  out.fill_interior([&](int i, int j, int k) {
    const int d[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    double lap = 0.0, adv = 0.0;
    for (int a = 0; a < 3; ++a) {
      auto at = [&](int s) { return periodic(u, i + s * d[a][0], j + s * d[a][1], k + s * d[a][2]); };
      lap += (-at(2) + 16.0 * at(1) - 30.0 * at(0) + 16.0 * at(-1) - at(-2)) / (12.0 * h * h);
      adv += c[a] * (-at(2) + 8.0 * at(1) - 8.0 * at(-1) + at(-2)) / (12.0 * h);
    }
    return nu * lap - adv;
  });
  return out;
}

/// Integral of nu(s) = nu0 + (nu0/2) sin(omega s) over [0, t].
inline double nu_integral(double t, double nu0, double omega) {
  if (omega == 0.0) return nu0 * t;
  return nu0 * t + nu0 / (2.0 * omega) * (1.0 - std::cos(omega * t));
}

/// a(t) from a' = -12 pi^2 nu(t) a, a(0) = 1, by RK4 with n steps.
inline double ode_amplitude(double t, double nu0, double omega, int n) {
  const double h = t / n;
  auto rate = [&](double s) { return -12.0 * kPi * kPi * (nu0 + 0.5 * nu0 * std::sin(omega * s)); };
  double a = 1.0;
  for (int m = 0; m < n; ++m) {
    const double s = m * h;
    const double k1 = rate(s) * a;
    const double k2 = rate(s + 0.5 * h) * (a + 0.5 * h * k1);
    const double k3 = rate(s + 0.5 * h) * (a + 0.5 * h * k2);
    const double k4 = rate(s + h) * (a + h * k3);
    a += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  return a;
}

enum class Scheme { coarse, fine };

/// Exact solution of the spatially discretised problem (no time-stepping
/// error) for the initial mode sin(2 pi x) sin(2 pi y) sin(2 pi z). Each axis
/// factor is Im(exp(-c mu t + lambda Theta(t)) e^{i k x}), with mu and lambda
/// the symbols of the discrete gradient and second derivative.
inline Field3 semi_discrete_solution(const GridSpec& g, double t, const ProblemSpec& p, Scheme s) {
  using cd = std::complex<double>;
  const double k = 2.0 * kPi;
  const double h = g.dx();
  const cd I(0.0, 1.0);
  const double theta = nu_integral(t, p.nu0, p.omega);
  double lambda;
  if (s == Scheme::coarse)
    lambda = (2.0 * std::cos(k * h) - 2.0) / (h * h);
  else
    lambda = (-2.0 * std::cos(2.0 * k * h) + 32.0 * std::cos(k * h) - 30.0) / (12.0 * h * h);
  std::array<cd, 3> z;
  for (int a = 0; a < 3; ++a) {
    cd mu;
    if (s == Scheme::fine)
      mu = I * (8.0 * std::sin(k * h) - std::sin(2.0 * k * h)) / (6.0 * h);
    else if (p.c[a] > 0)
      mu = (1.0 - std::exp(-I * k * h)) / h;
    else
      mu = (std::exp(I * k * h) - 1.0) / h;
    z[a] = -p.c[a] * mu * t + lambda * theta;
  }
  auto factor = [&](int a, int i) { return std::imag(std::exp(z[a] + I * k * (i * h))); };
  Field3 f(g);
  f.fill_interior([&](int i, int j, int kk) { return factor(0, i) * factor(1, j) * factor(2, kk); });
  return f;
}

inline double rel_diff(const Field3& a, const Field3& ref) {
  double num = 0.0, den = 0.0;
  const GridSpec& g = ref.spec();
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ny(); ++j)
      for (int i = 0; i < g.nx(); ++i) {
        num = std::max(num, std::abs(a(i, j, k) - ref(i, j, k)));
        den = std::max(den, std::abs(ref(i, j, k)));
      }
  return num / den;
}

inline double observed_order(double e_coarse, double e_fine, double refinement = 2.0) {
  return std::log(e_coarse / e_fine) / std::log(refinement);
}

}  // namespace oracle
