#pragma once

#include <optional>
#include <string>

namespace parastencil {

/// Inputs of the runtime model. tau_* are seconds per step.
struct PerfParams {
  int n_p = 1;
  int k = 1;
  int n_f = 1;  // fine steps per slice
  int n_c = 1;  // coarse steps per slice
  double tau_f = 1.0;
  double tau_c = 0.0;
  std::optional<double> tau_f_min;
  std::optional<double> tau_f_max;

  void validate() const;
};

/// Serial fine runtime N_p * N_f * tau_f.
double cost_serial(const PerfParams& p);

/// Pipelined Parareal runtime (N_p + K) N_c tau_c + K N_f tau_f,
/// communication ignored.
double cost_parareal(const PerfParams& p);

struct SpeedupBound {
  double s_bound = 0.0;
  double iteration_limit = 0.0;  // N_p / K
  double cost_limit = 0.0;       // (N_f / N_c)(tau_f / tau_c); +inf when tau_c == 0
};

SpeedupBound speedup_bound(const PerfParams& p);

struct Efficiencies {
  double e_bound = 0.0;     // S_bound / N_p
  double e_measured = 0.0;  // S_measured / N_p
};

Efficiencies efficiencies(const PerfParams& p, double s_measured);

/// Solves S_bound(N_p) = s_bound for tau_c/tau_f given N_p, K and N_c/N_f.
double back_solve_tau_ratio(double s_bound, int n_p, int k, double coarse_to_fine_steps);

/// S_bound as a function of the cost ratio r = tau_c/tau_f.
double speedup_bound_from_ratio(int n_p, int k, double coarse_to_fine_steps, double tau_ratio);

/// Per-node power draw by component, watts.
struct PowerProfile {
  double node = 0.0;
  double network = 0.0;
  double blower = 0.0;
  double device = 0.0;  // accelerator; 0 for a CPU-only backend

  double total() const { return node + network + blower + device; }

  static PowerProfile cpu_default();  // 133 / 25 / 14 / -
  static PowerProfile gpu_default();  // 70 / 25 / 14 / 135
  static PowerProfile by_name(const std::string& backend);
};

struct EnergyParams {
  PowerProfile power;
  double t_serial = 0.0;    // single-node serial runtime T_s
  double t_parallel = 0.0;  // Parareal runtime T_p on n_p nodes
  int n_p = 1;

  void validate() const;
};

struct EnergyReport {
  double power_per_node = 0.0;  // W
  double q_serial = 0.0;        // J, one node for T_s
  double q_parallel = 0.0;      // J, n_p nodes for T_p
  // Parallel energy split by component.
  double q_node = 0.0;
  double q_network = 0.0;
  double q_blower = 0.0;
  double q_device = 0.0;
  double s_p = 0.0;             // T_s / T_p
  double e_p = 0.0;             // S_p / N_p
  double gamma_measured = 0.0;  // Q_p / Q_s
  double gamma_ideal = 0.0;     // N_p / S_p = 1 / E_p
  double gamma_bound = 0.0;     // N_p / S_bound, when a bound was supplied
};

/// Throws std::domain_error when the serial energy is zero.
EnergyReport energy_model(const EnergyParams& e, std::optional<double> s_bound = std::nullopt);

/// Percentage with one decimal, e.g. 0.3262 -> "32.6".
std::string format_percent(double fraction);

}  // namespace parastencil
