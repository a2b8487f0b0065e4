#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "parastencil/parareal.hpp"
#include "parastencil/perfmodel.hpp"
#include "parastencil/problem.hpp"

namespace parastencil {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Mode {
  serial_fine,
  serial_coarse,
  parareal,
  convergence_study,
  speedup_study,
  thread_sweep,
  energy_report
};

const char* to_string(Mode m);
Mode mode_from_string(const std::string& name);

/// Everything one experiment needs. Serialized as flat `key = value` text;
/// see config_keys() for the schema.
struct ExperimentConfig {
  Mode mode = Mode::parareal;
  ProblemSpec problem;
  int n_slices = 8;
  int k_max = 3;
  TransportKind transport = TransportKind::in_process;
  bool coarse_is_fine = false;
  std::optional<double> stop_tolerance;
  std::optional<double> recv_timeout;
  int threads_per_worker = 1;
  int repetitions = 1;
  std::string output_path;

  // study sweeps
  std::vector<int> slice_sweep{4, 8};
  std::vector<double> omega_sweep{0.0, 100.0};
  std::vector<int> thread_sweep{1, 2, 4};

  // energy / model inputs
  std::string power_profile = "cpu";
  std::optional<double> power_node;
  std::optional<double> power_network;
  std::optional<double> power_blower;
  std::optional<double> power_device;
  std::optional<double> tau_ratio;  // replaces the measured tau_c/tau_f
  std::string timings_path;         // speedup CSV consumed by the energy report
  bool json_summary = false;

  PararealConfig parareal_config() const;
  PowerProfile power() const;
  void validate() const;
};

struct ConfigKey {
  std::string name;
  std::string help;
};

/// Every recognised key, in the order to_config_text writes them.
const std::vector<ConfigKey>& config_keys();

/// Sets one key; throws ConfigError for unknown keys or malformed values.
void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value);

/// Parses `key = value` lines; '#' starts a comment; blank lines ignored.
ExperimentConfig parse_config_text(const std::string& text, ExperimentConfig base = {});
ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base = {});

/// Resolved config in the same format parse_config_text reads.
std::string to_config_text(const ExperimentConfig& cfg);

}  // namespace parastencil
