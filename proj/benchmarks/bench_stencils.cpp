#include <benchmark/benchmark.h>

#include "parastencil/problem.hpp"
#include "parastencil/stencils.hpp"

using namespace parastencil;

static void BM_RhsCoarse(benchmark::State& state) {
  ProblemSpec p;
  p.grid = GridSpec::cube(static_cast<int>(state.range(0)));
  Field3 u = initial_condition(p.grid);
  Field3 out(p.grid);
  Executor ex(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    rhs_coarse(u, p.coeffs(0.0), out, ex);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(p.grid.interior_size()));
}
BENCHMARK(BM_RhsCoarse)->ArgsProduct({{16, 32, 64}, {1, 2, 4}})->UseRealTime();

static void BM_RhsFine(benchmark::State& state) {
  ProblemSpec p;
  p.grid = GridSpec::cube(static_cast<int>(state.range(0)));
  Field3 u = initial_condition(p.grid);
  Field3 out(p.grid);
  Executor ex(static_cast<int>(state.range(1)));
  for (auto _ : state) {
    rhs_fine(u, p.coeffs(0.0), out, ex);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * static_cast<int64_t>(p.grid.interior_size()));
}
BENCHMARK(BM_RhsFine)->ArgsProduct({{16, 32, 64}, {1, 2, 4}})->UseRealTime();

static void BM_HaloExchange(benchmark::State& state) {
  Field3 u = initial_condition(GridSpec::cube(static_cast<int>(state.range(0))));
  for (auto _ : state) {
    halo_exchange(u);
    benchmark::ClobberMemory();
  }
}
BENCHMARK(BM_HaloExchange)->Arg(16)->Arg(32)->Arg(64);
