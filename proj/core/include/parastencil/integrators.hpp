#pragma once

#include <optional>

#include "parastencil/executor.hpp"
#include "parastencil/grid.hpp"
#include "parastencil/problem.hpp"

namespace parastencil {

/// [t_start, t_end] covered in n_steps equal steps.
struct SliceInterval {
  double t_start = 0.0;
  double t_end = 0.0;
  int n_steps = 1;

  double step() const { return (t_end - t_start) / n_steps; }
  /// Start time of step n, computed from t_start rather than accumulated.
  double time_at(int n) const { return t_start + n * step(); }
  void validate() const;
};

enum class PropagatorKind { coarse_euler, fine_rk4 };

const char* to_string(PropagatorKind kind);

struct StepTiming {
  double seconds = 0.0;
  long steps = 0;
  double per_step() const { return steps > 0 ? seconds / static_cast<double>(steps) : 0.0; }
};

/// Advances a field across a time slice: forward Euler on the coarse
/// right-hand side, or classical RK4 on the fine one. Stage buffers are
/// allocated on first use and reused while the grid stays the same.
///
/// Euler samples nu at the start of each step; RK4 samples it at the stage
/// times t, t + h/2, t + h/2, t + h.
class Propagator {
 public:
  Propagator(PropagatorKind kind, ProblemSpec problem, Executor& ex = Executor::serial());

  PropagatorKind kind() const { return kind_; }
  const ProblemSpec& problem() const { return problem_; }

  void advance(Field3& u, const SliceInterval& iv);
  Field3 propagate(const Field3& u, const SliceInterval& iv);

  const StepTiming& timing() const { return timing_; }
  void reset_timing() { timing_ = {}; }

 private:
  void ensure_buffers(const GridSpec& g);
  void euler_step(Field3& u, double t, double h);
  void rk4_step(Field3& u, double t, double h);

  PropagatorKind kind_;
  ProblemSpec problem_;
  Executor* ex_;
  std::optional<GridSpec> buffer_grid_;
  std::vector<Field3> scratch_;  // k1..k4 and the stage argument
  StepTiming timing_;
};

Field3 propagate_coarse(const Field3& u, const SliceInterval& iv, const ProblemSpec& p);
Field3 propagate_fine(const Field3& u, const SliceInterval& iv, const ProblemSpec& p);

/// dt * (|c|_1 / dx + 6 nu_max / dx^2) for the coarse scheme; forward Euler
/// with upwinding is stable when this is <= 1.
double coarse_stability_number(const ProblemSpec& p);

}  // namespace parastencil
