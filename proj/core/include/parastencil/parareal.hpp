#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "parastencil/executor.hpp"
#include "parastencil/grid.hpp"
#include "parastencil/integrators.hpp"
#include "parastencil/problem.hpp"
#include "parastencil/transport.hpp"

namespace parastencil {

enum class TransportKind { in_process, multi_process };

const char* to_string(TransportKind kind);
TransportKind transport_from_string(const std::string& name);

struct PararealConfig {
  int n_slices = 8;  // one worker per slice
  int k_max = 3;
  ProblemSpec problem;
  TransportKind transport = TransportKind::in_process;
  int threads_per_worker = 1;
  /// Use the fine propagator in the coarse role as well (G = F).
  bool coarse_is_fine = false;
  /// Stop once a rank's predecessor has stopped and its own relative
  /// iterate change falls to this value. Unset: always run k_max iterations.
  std::optional<double> stop_tolerance;
  /// Receive timeout; unset means the transport's default (none in-process,
  /// 60 s for multi-process).
  std::optional<double> recv_timeout_seconds;

  int fine_steps_per_slice() const { return problem.fine_steps / n_slices; }
  int coarse_steps_per_slice() const { return problem.coarse_steps / n_slices; }
  /// Slice p covered with the fine (or coarse) step count.
  SliceInterval slice(int p, PropagatorKind kind) const;
  PropagatorKind coarse_kind() const {
    return coarse_is_fine ? PropagatorKind::fine_rk4 : PropagatorKind::coarse_euler;
  }
  Timeout effective_timeout() const;

  void validate() const;
};

/// Raised when any worker fails; carries the first failing rank and the
/// iteration it was in (-1 during initialisation).
class PararealError : public std::runtime_error {
 public:
  PararealError(int rank, int iteration, const std::string& what);
  int rank() const { return rank_; }
  int iteration() const { return iteration_; }

 private:
  int rank_;
  int iteration_;
};

/// Per-rank monitor series; entry k belongs to iteration k+1.
struct RankMonitor {
  int rank = 0;
  int iterations = 0;
  /// ||F(u_p^k) - u_{p+1}^k||_inf
  std::vector<double> residuals;
  /// ||u_{p+1}^{k+1} - u_{p+1}^k||_inf
  std::vector<double> iterate_changes;
  double fine_seconds = 0.0;
  double coarse_seconds = 0.0;
  double wall_seconds = 0.0;
};

struct PararealResult {
  /// u_{N_p}^k for k = 0 .. iterations, as held by the last rank.
  std::vector<Field3> final_iterates;
  std::vector<RankMonitor> ranks;
  double wall_seconds = 0.0;

  int iterations() const { return static_cast<int>(final_iterates.size()) - 1; }
  const Field3& final_field() const { return final_iterates.back(); }
  /// Max over ranks of the residual / iterate change of iteration k+1.
  std::vector<double> max_residuals() const;
  std::vector<double> max_iterate_changes() const;
};

struct SerialRun {
  Field3 u;
  double wall_seconds = 0.0;
  StepTiming timing;
};

/// Fine propagator applied slice after slice over [0, T].
SerialRun run_serial_fine(const PararealConfig& cfg);
/// Coarse propagator applied slice after slice over [0, T].
SerialRun run_serial_coarse(const PararealConfig& cfg);

/// The state machine of one time-slice rank:
///
///   init:       u_p^0 = G applied over slices 0..p-1 to u0;  c^0 = G(u_p^0)
///   iterate k:  f = F(u_p^k)                 (previous-iteration input)
///               u_p^{k+1} = recv(p-1)        (u0 on rank 0)
///               c^{k+1} = G(u_p^{k+1})
///               u_{p+1}^{k+1} = c^{k+1} + f - c^k
///               send(p+1)                    (not on the last rank)
class SliceWorker {
 public:
  SliceWorker(int rank, const PararealConfig& cfg, Executor& ex);

  int rank() const { return rank_; }

  /// Recomputes this rank's coarse prefix; no communication.
  void init(const Field3& u0);
  /// One iteration; returns u_{p+1}^{k+1}. Pass nullptr only on rank 0.
  const Field3& iterate(int k, Transport* transport);

  bool finished() const { return finished_; }
  int iterations_done() const { return iterations_; }

  const Field3& start_value() const { return u_start_; }   // u_p^k
  const Field3& coarse_value() const { return coarse_; }   // c^k
  const Field3& fine_value() const { return fine_; }       // F(u_p^{k-1})
  const Field3& end_value() const { return out_; }         // u_{p+1}^k

  double last_residual() const { return monitor_.residuals.empty() ? 0.0 : monitor_.residuals.back(); }
  double last_iterate_change() const {
    return monitor_.iterate_changes.empty() ? 0.0 : monitor_.iterate_changes.back();
  }
  const RankMonitor& monitor() const { return monitor_; }

 private:
  int rank_;
  const PararealConfig& cfg_;
  Field3 u0_;
  Field3 u_start_;
  Field3 coarse_;
  Field3 fine_;
  Field3 out_;
  Propagator coarse_prop_;
  Propagator fine_prop_;
  bool predecessor_finished_;
  bool finished_ = false;
  int iterations_ = 0;
  RankMonitor monitor_;
};

PararealResult run_parareal(const PararealConfig& cfg);

/// ||u_parareal - u_fine||_inf / ||u_fine||_inf.
double defect(const Field3& u_parareal, const Field3& u_fine);

/// Defect series against the serial fine run plus discretization errors
/// against the analytic solution at T.
ConvergenceReport make_convergence_report(const PararealResult& result, const Field3& u_fine,
                                          const Field3& u_coarse, const ProblemSpec& problem);

}  // namespace parastencil
