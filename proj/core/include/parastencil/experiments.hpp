#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

#include "parastencil/config.hpp"
#include "parastencil/records.hpp"

namespace parastencil {

/// The energy report was asked to read timings that do not exist yet.
class MissingTimingsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Result of one subcommand: generic run records, the study-specific table
/// written to output_path, and soft-check warnings.
struct StudyOutput {
  std::vector<RunRecord> records;
  CsvTable table;
  std::vector<std::string> warnings;
};

/// Cores visible to this process (at least 1).
int available_cores();

/// Best-of-`repetitions` seconds per step of the fine and coarse
/// propagators over one slice on a single worker.
struct PropagatorTimings {
  double tau_f = 0.0;
  double tau_c = 0.0;
};
PropagatorTimings measure_step_costs(const PararealConfig& cfg, int repetitions);

/// serial_fine, serial_coarse or parareal, depending on cfg.mode.
StudyOutput cmd_run(const ExperimentConfig& cfg, std::ostream& log);

/// Columns n_p, omega, k, defect for every (N_p, omega) of the sweep.
StudyOutput cmd_convergence(const ExperimentConfig& cfg, std::ostream& log);

/// Measured against modelled speedup per N_p of the sweep at K = k_max.
StudyOutput cmd_speedup(const ExperimentConfig& cfg, std::ostream& log);

/// Parareal wall time per threads_per_worker of the sweep at fixed N_p.
StudyOutput cmd_thread_sweep(const ExperimentConfig& cfg, std::ostream& log);

/// Energy stack and overheads from a speedup CSV (cfg.timings_path).
/// Throws MissingTimingsError when that file is absent.
StudyOutput cmd_energy(const ExperimentConfig& cfg, std::ostream& log);

/// Prints `Table 1`-style rows from a speedup table.
void print_speedup_table(const CsvTable& speedup, std::ostream& out);

struct CheckResult {
  std::string name;
  enum class Status { pass, fail, skip } status = Status::pass;
  std::string detail;
};

const char* to_string(CheckResult::Status s);

/// Quick model and correctness checks on a small problem.
std::vector<CheckResult> cmd_selftest(std::ostream& log);

/// Writes table to cfg.output_path, the records to `<output>.records.csv`,
/// the resolved config to `<output>.config` and, when requested, a JSON
/// summary to `<output>.json`. No-op without an output path.
void write_outputs(const ExperimentConfig& cfg, const StudyOutput& out);

}  // namespace parastencil
