#include <benchmark/benchmark.h>

#include "parastencil/integrators.hpp"

using namespace parastencil;

// tau_f and tau_c per step, the inputs of the speedup model
static void BM_Step(benchmark::State& state, PropagatorKind kind) {
  ProblemSpec p = ProblemSpec::desk();
  p.grid = GridSpec::cube(static_cast<int>(state.range(0)));
  Executor ex(1);
  Propagator prop(kind, p, ex);
  Field3 u = initial_condition(p.grid);
  const double h = kind == PropagatorKind::fine_rk4 ? p.dt_fine() : p.dt_coarse();
  double t = 0.0;
  for (auto _ : state) {
    prop.advance(u, {t, t + h, 1});
    t += h;
  }
  state.counters["cells"] = static_cast<double>(p.grid.interior_size());
}
BENCHMARK_CAPTURE(BM_Step, euler, PropagatorKind::coarse_euler)->Arg(16)->Arg(32)->Arg(64);
BENCHMARK_CAPTURE(BM_Step, rk4, PropagatorKind::fine_rk4)->Arg(16)->Arg(32)->Arg(64);
