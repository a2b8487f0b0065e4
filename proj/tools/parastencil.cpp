#include <cstdlib>
#include <iostream>
#include <map>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "parastencil/config.hpp"
#include "parastencil/experiments.hpp"
#include "parastencil/parareal.hpp"
#include "parastencil/transport.hpp"

namespace ps = parastencil;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitWorker = 3;
constexpr int kExitSelftest = 4;

struct Overrides {
  std::string config_path;
  std::vector<std::string> sets;
  std::map<std::string, std::string> flags;
};

void add_config_options(CLI::App* sub, Overrides& o) {
  sub->add_option("-c,--config", o.config_path, "config file (default: $PARASTENCIL_CONFIG)");
  sub->add_option("--set", o.sets, "key=value override, repeatable");
  for (const auto& key : ps::config_keys()) {
    if (key.name == "mode") continue;
    sub->add_option_function<std::string>(
        "--" + key.name, [&o, name = key.name](const std::string& v) { o.flags[name] = v; }, key.help);
  }
}

ps::ExperimentConfig resolve(const Overrides& o, std::optional<ps::Mode> mode) {
  ps::ExperimentConfig cfg;
  std::string path = o.config_path;
  if (path.empty())
    if (const char* env = std::getenv("PARASTENCIL_CONFIG")) path = env;
  if (!path.empty()) cfg = ps::load_config_file(path, cfg);
  for (const auto& s : o.sets) {
    const auto eq = s.find('=');
    if (eq == std::string::npos) throw ps::ConfigError("--set expects key=value, got '" + s + "'");
    ps::apply_setting(cfg, s.substr(0, eq), s.substr(eq + 1));
  }
  for (const auto& [k, v] : o.flags) ps::apply_setting(cfg, k, v);
  if (mode) cfg.mode = *mode;
  cfg.validate();
  return cfg;
}

void report(const ps::ExperimentConfig& cfg, const ps::StudyOutput& out) {
  ps::write_outputs(cfg, out);
  if (cfg.output_path.empty()) ps::write_csv(std::cout, out.table);
  else std::cerr << "wrote " << cfg.output_path << "\n";
  for (const auto& w : out.warnings) std::cerr << "warning: " << w << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Pipelined Parareal with stencil propagators for 3D advection-diffusion"};
  app.require_subcommand(1);

  Overrides run_o, conv_o, speed_o, threads_o, energy_o;
  std::string run_mode = "parareal";
  auto* run = app.add_subcommand("run", "single run: serial_fine, serial_coarse or parareal");
  run->add_option("--mode", run_mode, "serial_fine | serial_coarse | parareal");
  add_config_options(run, run_o);
  auto* conv = app.add_subcommand("convergence", "defect d^k per iteration over the N_p and omega sweeps");
  add_config_options(conv, conv_o);
  auto* speed = app.add_subcommand("speedup", "measured and modelled speedup over the N_p sweep");
  add_config_options(speed, speed_o);
  auto* threads = app.add_subcommand("threads", "spatial speedup over threads_per_worker");
  add_config_options(threads, threads_o);
  auto* energy = app.add_subcommand("energy", "energy-to-solution from speedup timings");
  add_config_options(energy, energy_o);
  auto* selftest = app.add_subcommand("selftest", "quick model and correctness checks");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitConfig;
  }

  try {
    if (*selftest) {
      bool ok = true;
      for (const auto& c : ps::cmd_selftest(std::cout)) ok = ok && c.status != ps::CheckResult::Status::fail;
      return ok ? 0 : kExitSelftest;
    }
    if (*run) {
      const auto cfg = resolve(run_o, ps::mode_from_string(run_mode));
      report(cfg, ps::cmd_run(cfg, std::cerr));
    } else if (*conv) {
      const auto cfg = resolve(conv_o, ps::Mode::convergence_study);
      report(cfg, ps::cmd_convergence(cfg, std::cerr));
    } else if (*speed) {
      const auto cfg = resolve(speed_o, ps::Mode::speedup_study);
      report(cfg, ps::cmd_speedup(cfg, std::cerr));
    } else if (*threads) {
      const auto cfg = resolve(threads_o, ps::Mode::thread_sweep);
      report(cfg, ps::cmd_thread_sweep(cfg, std::cerr));
    } else if (*energy) {
      const auto cfg = resolve(energy_o, ps::Mode::energy_report);
      report(cfg, ps::cmd_energy(cfg, std::cerr));
    }
  } catch (const ps::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const ps::MissingTimingsError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "run failed: " << e.what() << "\n";
    return kExitWorker;
  }
  return 0;
}
