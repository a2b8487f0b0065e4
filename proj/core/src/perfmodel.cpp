#include "parastencil/perfmodel.hpp"

#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

namespace parastencil {

void PerfParams::validate() const {
  if (n_p < 1 || k < 1 || n_f < 1 || n_c < 1) throw std::invalid_argument("step and worker counts must be >= 1");
  if (!(tau_f > 0.0)) throw std::invalid_argument("tau_f must be > 0");
  if (!(tau_c >= 0.0)) throw std::invalid_argument("tau_c must be >= 0");
  if (tau_f_min && *tau_f_min > tau_f) throw std::invalid_argument("tau_f below its lower bound");
  if (tau_f_max && *tau_f_max < tau_f) throw std::invalid_argument("tau_f above its upper bound");
}

double cost_serial(const PerfParams& p) {
  return static_cast<double>(p.n_p) * p.n_f * p.tau_f;
}

double cost_parareal(const PerfParams& p) {
  return static_cast<double>(p.n_p + p.k) * p.n_c * p.tau_c + static_cast<double>(p.k) * p.n_f * p.tau_f;
}

double speedup_bound_from_ratio(int n_p, int k, double coarse_to_fine_steps, double tau_ratio) {
  const double kp = static_cast<double>(k) / n_p;
  return 1.0 / ((1.0 + kp) * coarse_to_fine_steps * tau_ratio + kp);
}

double back_solve_tau_ratio(double s_bound, int n_p, int k, double coarse_to_fine_steps) {
  const double kp = static_cast<double>(k) / n_p;
  const double r = (1.0 / s_bound - kp) / ((1.0 + kp) * coarse_to_fine_steps);
  if (!(r >= 0.0)) throw std::domain_error("speedup exceeds N_p/K; no nonnegative cost ratio fits");
  return r;
}

SpeedupBound speedup_bound(const PerfParams& p) {
  p.validate();
  SpeedupBound b;
  const double ratio = static_cast<double>(p.n_c) / p.n_f;
  b.s_bound = speedup_bound_from_ratio(p.n_p, p.k, ratio, p.tau_c / p.tau_f);
  b.iteration_limit = static_cast<double>(p.n_p) / p.k;
  b.cost_limit = p.tau_c > 0.0 ? (static_cast<double>(p.n_f) / p.n_c) * (p.tau_f / p.tau_c)
                               : std::numeric_limits<double>::infinity();
  return b;
}

Efficiencies efficiencies(const PerfParams& p, double s_measured) {
  if (!(s_measured >= 0.0)) throw std::invalid_argument("measured speedup must be >= 0");
  const double s_ideal = p.n_p;
  return {speedup_bound(p).s_bound / s_ideal, s_measured / s_ideal};
}

PowerProfile PowerProfile::cpu_default() { return {133.0, 25.0, 14.0, 0.0}; }

PowerProfile PowerProfile::gpu_default() { return {70.0, 25.0, 14.0, 135.0}; }

PowerProfile PowerProfile::by_name(const std::string& backend) {
  if (backend == "cpu") return cpu_default();
  if (backend == "gpu") return gpu_default();
  throw std::invalid_argument("unknown power profile '" + backend + "' (cpu | gpu)");
}

void EnergyParams::validate() const {
  if (power.node < 0 || power.network < 0 || power.blower < 0 || power.device < 0)
    throw std::invalid_argument("power components must be >= 0");
  if (t_serial < 0 || t_parallel < 0) throw std::invalid_argument("runtimes must be >= 0");
  if (n_p < 1) throw std::invalid_argument("n_p must be >= 1");
}

EnergyReport energy_model(const EnergyParams& e, std::optional<double> s_bound) {
  e.validate();
  EnergyReport r;
  const double np = e.n_p;
  r.power_per_node = e.power.total();
  r.q_serial = r.power_per_node * e.t_serial;
  if (r.q_serial == 0.0) throw std::domain_error("serial baseline energy is zero");
  r.q_node = np * e.power.node * e.t_parallel;
  r.q_network = np * e.power.network * e.t_parallel;
  r.q_blower = np * e.power.blower * e.t_parallel;
  r.q_device = np * e.power.device * e.t_parallel;
  r.q_parallel = np * r.power_per_node * e.t_parallel;
  r.gamma_measured = r.q_parallel / r.q_serial;
  if (e.t_parallel > 0.0) {
    r.s_p = e.t_serial / e.t_parallel;
    r.e_p = r.s_p / np;
    r.gamma_ideal = np / r.s_p;
  }
  if (s_bound) r.gamma_bound = np / *s_bound;
  return r;
}

std::string format_percent(double fraction) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f", 100.0 * fraction);
  return buf;
}

}  // namespace parastencil
