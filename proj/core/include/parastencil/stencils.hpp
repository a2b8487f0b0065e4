#pragma once

#include <array>
#include <cstddef>
#include <stdexcept>
#include <type_traits>

#include "parastencil/executor.hpp"
#include "parastencil/grid.hpp"

namespace parastencil {

/// Coefficients of u_t + c.grad(u) = nu * lap(u) frozen at one evaluation time.
struct StencilCoeffs {
  std::array<double, 3> c{0.0, 0.0, 0.0};
  double nu = 0.0;
  double dx = 1.0;

  void validate() const;
};

/// Radius of the widest stencil each right-hand side reads.
inline constexpr int kCoarseRadius = 1;
inline constexpr int kFineRadius = 2;

/// Evaluates out(i,j,k) = kernel(idx, ins.data()...) for every interior point,
/// where idx is the storage offset of (i,j,k) in the shared layout. Interior
/// rows are split in contiguous blocks across the executor's lanes; each
/// point is computed by the same expression whatever the split, so results
/// do not depend on the lane count. out must not be one of ins.
template <class Kernel, class... Ins>
void apply_parallel(Executor& ex, Field3& out, Kernel&& kernel, const Ins&... ins) {
  static_assert((std::is_same_v<Ins, Field3> && ...), "inputs must be Field3");
  const GridSpec& g = out.spec();
  (require_same_grid(out, ins), ...);
  if (((&out == &ins) || ...)) throw std::invalid_argument("apply_parallel: output aliases an input");

  const std::size_t rows = static_cast<std::size_t>(g.ny()) * g.nz();
  double* o = out.data();
  ex.parallel_for(rows, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const int j = static_cast<int>(r % g.ny());
      const int k = static_cast<int>(r / g.ny());
      const std::size_t base = g.index(0, j, k);
      for (int i = 0; i < g.nx(); ++i) {
        const std::size_t idx = base + static_cast<std::size_t>(i);
        o[idx] = kernel(idx, ins.data()...);
      }
    }
  });
}

/// Runs fn(idx) for every interior storage offset, split like apply_parallel.
/// For pointwise in-place updates where fn touches only index idx.
template <class Fn>
void for_each_interior(Executor& ex, const GridSpec& g, Fn&& fn) {
  const std::size_t rows = static_cast<std::size_t>(g.ny()) * g.nz();
  ex.parallel_for(rows, [&](std::size_t begin, std::size_t end) {
    for (std::size_t r = begin; r < end; ++r) {
      const std::size_t base = g.index(0, static_cast<int>(r % g.ny()), static_cast<int>(r / g.ny()));
      for (int i = 0; i < g.nx(); ++i) fn(base + static_cast<std::size_t>(i));
    }
  });
}

/// 1st-order upwind advection plus 2nd-order 7-point diffusion, fused in one
/// sweep: out = nu * lap2(u) - upwind(c, u). Refreshes u's halos first.
void rhs_coarse(Field3& u, const StencilCoeffs& s, Field3& out, Executor& ex = Executor::serial());
Field3 rhs_coarse(Field3 u, const StencilCoeffs& s);

/// 4th-order centered advection and diffusion:
/// out = nu * lap4(u) - c.grad4(u). Refreshes u's halos first.
void rhs_fine(Field3& u, const StencilCoeffs& s, Field3& out, Executor& ex = Executor::serial());
Field3 rhs_fine(Field3 u, const StencilCoeffs& s);

}  // namespace parastencil
