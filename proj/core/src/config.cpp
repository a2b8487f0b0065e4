#include "parastencil/config.hpp"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

namespace parastencil {

const char* to_string(Mode m) {
  switch (m) {
    case Mode::serial_fine: return "serial_fine";
    case Mode::serial_coarse: return "serial_coarse";
    case Mode::parareal: return "parareal";
    case Mode::convergence_study: return "convergence_study";
    case Mode::speedup_study: return "speedup_study";
    case Mode::thread_sweep: return "thread_sweep";
    case Mode::energy_report: return "energy_report";
  }
  return "unknown";
}

Mode mode_from_string(const std::string& name) {
  for (Mode m : {Mode::serial_fine, Mode::serial_coarse, Mode::parareal, Mode::convergence_study,
                 Mode::speedup_study, Mode::thread_sweep, Mode::energy_report})
    if (name == to_string(m)) return m;
  throw ConfigError("unknown mode '" + name + "'");
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::string fmt_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

double parse_double(const std::string& key, const std::string& v) {
  try {
    std::size_t used = 0;
    const double d = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  }
}

int parse_int(const std::string& key, const std::string& v) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size())
    throw ConfigError("key '" + key + "': expected an integer, got '" + v + "'");
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw ConfigError("key '" + key + "': expected true/false, got '" + v + "'");
}

std::vector<std::string> split_list(const std::string& v) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

template <class T, class Fmt>
std::string join(const std::vector<T>& xs, Fmt fmt) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + fmt(xs[i]);
  return out;
}

std::optional<double> parse_optional(const std::string& key, const std::string& v) {
  if (v.empty() || v == "none") return std::nullopt;
  return parse_double(key, v);
}

std::string fmt_optional(const std::optional<double>& v) { return v ? fmt_double(*v) : "none"; }

struct KeyHandler {
  ConfigKey key;
  std::function<void(ExperimentConfig&, const std::string&)> set;
  std::function<std::string(const ExperimentConfig&)> get;
};

void set_grid(ExperimentConfig& c, int nx, int ny, int nz) {
  try {
    c.problem.grid = GridSpec(nx, ny, nz, c.problem.grid.halo());
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
}

const std::vector<KeyHandler>& handlers() {
  static const std::vector<KeyHandler> table = {
      {{"mode", "serial_fine | serial_coarse | parareal | convergence_study | speedup_study | thread_sweep | "
                "energy_report"},
       [](auto& c, auto& v) { c.mode = mode_from_string(v); },
       [](auto& c) { return std::string(to_string(c.mode)); }},
      {{"nx", "grid points per axis (sets ny and nz too unless given)"},
       [](auto& c, auto& v) {
         const int n = parse_int("nx", v);
         set_grid(c, n, n, n);
       },
       [](auto& c) { return std::to_string(c.problem.grid.nx()); }},
      {{"ny", "grid points along y"},
       [](auto& c, auto& v) { set_grid(c, c.problem.grid.nx(), parse_int("ny", v), c.problem.grid.nz()); },
       [](auto& c) { return std::to_string(c.problem.grid.ny()); }},
      {{"nz", "grid points along z"},
       [](auto& c, auto& v) { set_grid(c, c.problem.grid.nx(), c.problem.grid.ny(), parse_int("nz", v)); },
       [](auto& c) { return std::to_string(c.problem.grid.nz()); }},
      {{"velocity", "advection velocity cx,cy,cz"},
       [](auto& c, auto& v) {
         const auto parts = split_list(v);
         if (parts.size() != 3) throw ConfigError("key 'velocity': expected three comma-separated numbers");
         for (int a = 0; a < 3; ++a) c.problem.c[a] = parse_double("velocity", parts[a]);
       },
       [](auto& c) {
         return fmt_double(c.problem.c[0]) + "," + fmt_double(c.problem.c[1]) + "," + fmt_double(c.problem.c[2]);
       }},
      {{"nu0", "base diffusion coefficient"},
       [](auto& c, auto& v) { c.problem.nu0 = parse_double("nu0", v); },
       [](auto& c) { return fmt_double(c.problem.nu0); }},
      {{"omega", "oscillation frequency of the diffusion coefficient"},
       [](auto& c, auto& v) { c.problem.omega = parse_double("omega", v); },
       [](auto& c) { return fmt_double(c.problem.omega); }},
      {{"end_time", "final time T"},
       [](auto& c, auto& v) { c.problem.T = parse_double("end_time", v); },
       [](auto& c) { return fmt_double(c.problem.T); }},
      {{"fine_steps", "total fine (RK4) steps over [0, T]"},
       [](auto& c, auto& v) { c.problem.fine_steps = parse_int("fine_steps", v); },
       [](auto& c) { return std::to_string(c.problem.fine_steps); }},
      {{"coarse_steps", "total coarse (Euler) steps over [0, T]"},
       [](auto& c, auto& v) { c.problem.coarse_steps = parse_int("coarse_steps", v); },
       [](auto& c) { return std::to_string(c.problem.coarse_steps); }},
      {{"n_slices", "time slices = concurrent workers"},
       [](auto& c, auto& v) { c.n_slices = parse_int("n_slices", v); },
       [](auto& c) { return std::to_string(c.n_slices); }},
      {{"k_max", "Parareal iterations"},
       [](auto& c, auto& v) { c.k_max = parse_int("k_max", v); },
       [](auto& c) { return std::to_string(c.k_max); }},
      {{"transport", "in_process | multi_process"},
       [](auto& c, auto& v) {
         try {
           c.transport = transport_from_string(v);
         } catch (const std::invalid_argument& e) {
           throw ConfigError(e.what());
         }
       },
       [](auto& c) { return std::string(to_string(c.transport)); }},
      {{"coarse_is_fine", "use the fine propagator as the coarse one"},
       [](auto& c, auto& v) { c.coarse_is_fine = parse_bool("coarse_is_fine", v); },
       [](auto& c) { return std::string(c.coarse_is_fine ? "true" : "false"); }},
      {{"stop_tolerance", "relative iterate change for early stop, or none"},
       [](auto& c, auto& v) { c.stop_tolerance = parse_optional("stop_tolerance", v); },
       [](auto& c) { return fmt_optional(c.stop_tolerance); }},
      {{"recv_timeout", "receive timeout in seconds, or none for the transport default"},
       [](auto& c, auto& v) { c.recv_timeout = parse_optional("recv_timeout", v); },
       [](auto& c) { return fmt_optional(c.recv_timeout); }},
      {{"threads_per_worker", "data-parallel lanes per worker"},
       [](auto& c, auto& v) { c.threads_per_worker = parse_int("threads_per_worker", v); },
       [](auto& c) { return std::to_string(c.threads_per_worker); }},
      {{"repetitions", "best-of count for tau_f / tau_c timing"},
       [](auto& c, auto& v) { c.repetitions = parse_int("repetitions", v); },
       [](auto& c) { return std::to_string(c.repetitions); }},
      {{"output", "CSV output path (empty: stdout only)"},
       [](auto& c, auto& v) { c.output_path = v; },
       [](auto& c) { return c.output_path; }},
      {{"slices", "n_slices sweep for studies"},
       [](auto& c, auto& v) {
         c.slice_sweep.clear();
         for (const auto& s : split_list(v)) c.slice_sweep.push_back(parse_int("slices", s));
       },
       [](auto& c) { return join(c.slice_sweep, [](int x) { return std::to_string(x); }); }},
      {{"omegas", "omega sweep for the convergence study"},
       [](auto& c, auto& v) {
         c.omega_sweep.clear();
         for (const auto& s : split_list(v)) c.omega_sweep.push_back(parse_double("omegas", s));
       },
       [](auto& c) { return join(c.omega_sweep, fmt_double); }},
      {{"threads", "threads_per_worker sweep"},
       [](auto& c, auto& v) {
         c.thread_sweep.clear();
         for (const auto& s : split_list(v)) c.thread_sweep.push_back(parse_int("threads", s));
       },
       [](auto& c) { return join(c.thread_sweep, [](int x) { return std::to_string(x); }); }},
      {{"power_profile", "cpu | gpu per-node power defaults"},
       [](auto& c, auto& v) {
         try {
           PowerProfile::by_name(v);
         } catch (const std::invalid_argument& e) {
           throw ConfigError(e.what());
         }
         c.power_profile = v;
       },
       [](auto& c) { return c.power_profile; }},
      {{"power_node", "override node power (W), or none"},
       [](auto& c, auto& v) { c.power_node = parse_optional("power_node", v); },
       [](auto& c) { return fmt_optional(c.power_node); }},
      {{"power_network", "override network power (W), or none"},
       [](auto& c, auto& v) { c.power_network = parse_optional("power_network", v); },
       [](auto& c) { return fmt_optional(c.power_network); }},
      {{"power_blower", "override blower power (W), or none"},
       [](auto& c, auto& v) { c.power_blower = parse_optional("power_blower", v); },
       [](auto& c) { return fmt_optional(c.power_blower); }},
      {{"power_device", "override accelerator power (W), or none"},
       [](auto& c, auto& v) { c.power_device = parse_optional("power_device", v); },
       [](auto& c) { return fmt_optional(c.power_device); }},
      {{"tau_ratio", "fixed tau_c/tau_f instead of measuring it, or none"},
       [](auto& c, auto& v) { c.tau_ratio = parse_optional("tau_ratio", v); },
       [](auto& c) { return fmt_optional(c.tau_ratio); }},
      {{"timings", "speedup CSV read by the energy report"},
       [](auto& c, auto& v) { c.timings_path = v; },
       [](auto& c) { return c.timings_path; }},
      {{"json", "also write a JSON summary next to the CSV"},
       [](auto& c, auto& v) { c.json_summary = parse_bool("json", v); },
       [](auto& c) { return std::string(c.json_summary ? "true" : "false"); }},
  };
  return table;
}

}  // namespace

const std::vector<ConfigKey>& config_keys() {
  static const std::vector<ConfigKey> keys = [] {
    std::vector<ConfigKey> out;
    for (const auto& h : handlers()) out.push_back(h.key);
    return out;
  }();
  return keys;
}

void apply_setting(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
  for (const auto& h : handlers())
    if (h.key.name == key) {
      h.set(cfg, trim(value));
      return;
    }
  throw ConfigError("unknown config key '" + key + "'");
}

ExperimentConfig parse_config_text(const std::string& text, ExperimentConfig base) {
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError("line " + std::to_string(lineno) + ": expected key = value");
    try {
      apply_setting(base, trim(line.substr(0, eq)), line.substr(eq + 1));
    } catch (const ConfigError& e) {
      throw ConfigError("line " + std::to_string(lineno) + ": " + e.what());
    }
  }
  return base;
}

ExperimentConfig load_config_file(const std::string& path, ExperimentConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config_text(ss.str(), std::move(base));
}

std::string to_config_text(const ExperimentConfig& cfg) {
  std::string out;
  for (const auto& h : handlers()) out += h.key.name + " = " + h.get(cfg) + "\n";
  return out;
}

PararealConfig ExperimentConfig::parareal_config() const {
  PararealConfig p;
  p.n_slices = n_slices;
  p.k_max = k_max;
  p.problem = problem;
  p.transport = transport;
  p.threads_per_worker = threads_per_worker;
  p.coarse_is_fine = coarse_is_fine;
  p.stop_tolerance = stop_tolerance;
  p.recv_timeout_seconds = recv_timeout;
  return p;
}

PowerProfile ExperimentConfig::power() const {
  PowerProfile p = PowerProfile::by_name(power_profile);
  if (power_node) p.node = *power_node;
  if (power_network) p.network = *power_network;
  if (power_blower) p.blower = *power_blower;
  if (power_device) p.device = *power_device;
  return p;
}

void ExperimentConfig::validate() const {
  try {
    parareal_config().validate();
    if (repetitions < 1) throw ConfigError("repetitions must be >= 1");
    if (mode == Mode::convergence_study || mode == Mode::speedup_study)
      for (int n : slice_sweep) {
        PararealConfig p = parareal_config();
        p.n_slices = n;
        p.validate();
      }
    for (int t : thread_sweep)
      if (t < 1) throw ConfigError("thread counts must be >= 1");
    if (tau_ratio && !(*tau_ratio >= 0.0)) throw ConfigError("tau_ratio must be >= 0");
    EnergyParams{power(), 0.0, 0.0, 1}.validate();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(e.what());
  }
}

}  // namespace parastencil
