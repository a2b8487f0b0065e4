#include "parastencil/integrators.hpp"

#include <chrono>
#include <cmath>
#include <stdexcept>

#include "parastencil/stencils.hpp"

namespace parastencil {

void SliceInterval::validate() const {
  if (!(t_end > t_start)) throw std::invalid_argument("slice must satisfy t_end > t_start");
  if (n_steps < 1) throw std::invalid_argument("slice needs at least one step");
}

const char* to_string(PropagatorKind kind) {
  switch (kind) {
    case PropagatorKind::coarse_euler: return "coarse_euler";
    case PropagatorKind::fine_rk4: return "fine_rk4";
  }
  return "unknown";
}

Propagator::Propagator(PropagatorKind kind, ProblemSpec problem, Executor& ex)
    : kind_(kind), problem_(std::move(problem)), ex_(&ex) {
  problem_.validate();
}

void Propagator::ensure_buffers(const GridSpec& g) {
  if (buffer_grid_ && *buffer_grid_ == g) return;
  scratch_.clear();
  const int count = kind_ == PropagatorKind::fine_rk4 ? 5 : 1;
  for (int n = 0; n < count; ++n) scratch_.emplace_back(g);
  buffer_grid_ = g;
}

void Propagator::advance(Field3& u, const SliceInterval& iv) {
  iv.validate();
  const GridSpec& g = u.spec();
  if (g.nx() != problem_.grid.nx() || g.ny() != problem_.grid.ny() || g.nz() != problem_.grid.nz())
    throw ShapeError("field grid " + to_string(g) + " does not match the problem grid " + to_string(problem_.grid));
  ensure_buffers(g);
  const auto start = std::chrono::steady_clock::now();
  const double h = iv.step();
  for (int n = 0; n < iv.n_steps; ++n) {
    const double t = iv.time_at(n);
    if (kind_ == PropagatorKind::coarse_euler)
      euler_step(u, t, h);
    else
      rk4_step(u, t, h);
  }
  timing_.seconds += std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  timing_.steps += iv.n_steps;
}

Field3 Propagator::propagate(const Field3& u, const SliceInterval& iv) {
  Field3 out = u;
  advance(out, iv);
  return out;
}

void Propagator::euler_step(Field3& u, double t, double h) {
  Field3& rhs = scratch_[0];
  rhs_coarse(u, problem_.coeffs(t), rhs, *ex_);
  double* pu = u.data();
  const double* pr = rhs.data();
  for_each_interior(*ex_, u.spec(), [=](std::size_t idx) { pu[idx] = pu[idx] + h * pr[idx]; });
}

void Propagator::rk4_step(Field3& u, double t, double h) {
  Field3& k1 = scratch_[0];
  Field3& k2 = scratch_[1];
  Field3& k3 = scratch_[2];
  Field3& k4 = scratch_[3];
  Field3& stage = scratch_[4];
  const GridSpec& g = u.spec();
  const double half = 0.5 * h;

  auto make_stage = [&](const Field3& k, double a) {
    apply_parallel(
        *ex_, stage, [a](std::size_t idx, const double* pu, const double* pk) { return pu[idx] + a * pk[idx]; },
        u, k);
  };

  rhs_fine(u, problem_.coeffs(t), k1, *ex_);
  make_stage(k1, half);
  rhs_fine(stage, problem_.coeffs(t + half), k2, *ex_);
  make_stage(k2, half);
  rhs_fine(stage, problem_.coeffs(t + half), k3, *ex_);
  make_stage(k3, h);
  rhs_fine(stage, problem_.coeffs(t + h), k4, *ex_);

  double* pu = u.data();
  const double *p1 = k1.data(), *p2 = k2.data(), *p3 = k3.data(), *p4 = k4.data();
  const double w = h / 6.0;
  for_each_interior(*ex_, g, [=](std::size_t idx) {
    pu[idx] = pu[idx] + w * (p1[idx] + 2.0 * p2[idx] + 2.0 * p3[idx] + p4[idx]);
  });
}

Field3 propagate_coarse(const Field3& u, const SliceInterval& iv, const ProblemSpec& p) {
  Propagator g(PropagatorKind::coarse_euler, p);
  return g.propagate(u, iv);
}

Field3 propagate_fine(const Field3& u, const SliceInterval& iv, const ProblemSpec& p) {
  Propagator f(PropagatorKind::fine_rk4, p);
  return f.propagate(u, iv);
}

double coarse_stability_number(const ProblemSpec& p) {
  const double dx = p.grid.dx();
  const double c1 = std::abs(p.c[0]) + std::abs(p.c[1]) + std::abs(p.c[2]);
  const double nu_max = p.nu0 * (p.omega != 0.0 ? 1.5 : 1.0);
  return p.dt_coarse() * (c1 / dx + 6.0 * nu_max / (dx * dx));
}

}  // namespace parastencil
