#include "parastencil/experiments.hpp"

#include <sched.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <ostream>
#include <thread>

#include "json.hpp"
#include "parastencil/parareal.hpp"
#include "parastencil/perfmodel.hpp"

namespace parastencil {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

std::vector<double> defect_series(const PararealResult& r, const Field3& u_fine) {
  std::vector<double> d;
  for (const auto& it : r.final_iterates) d.push_back(defect(it, u_fine));
  return d;
}

PararealConfig forced_iterations(PararealConfig p) {
  p.stop_tolerance.reset();
  return p;
}

}  // namespace

int available_cores() {
  cpu_set_t set;
  if (sched_getaffinity(0, sizeof set, &set) == 0) return std::max(1, CPU_COUNT(&set));
  return std::max(1u, std::thread::hardware_concurrency());
}

const char* to_string(CheckResult::Status s) {
  switch (s) {
    case CheckResult::Status::pass: return "PASS";
    case CheckResult::Status::fail: return "FAIL";
    case CheckResult::Status::skip: return "SKIP";
  }
  return "?";
}

PropagatorTimings measure_step_costs(const PararealConfig& cfg, int repetitions) {
  Executor ex(cfg.threads_per_worker);
  const Field3 u0 = initial_condition(cfg.problem.grid);
  auto best_per_step = [&](PropagatorKind kind) {
    Propagator prop(kind, cfg.problem, ex);
    const SliceInterval iv = cfg.slice(0, kind);
    double best = std::numeric_limits<double>::infinity();
    for (int r = 0; r < std::max(1, repetitions); ++r) {
      Field3 u = u0;
      const auto start = std::chrono::steady_clock::now();
      prop.advance(u, iv);
      best = std::min(best, seconds_since(start) / iv.n_steps);
    }
    return best;
  };
  return {best_per_step(PropagatorKind::fine_rk4), best_per_step(cfg.coarse_kind())};
}

StudyOutput cmd_run(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  const PararealConfig pc = cfg.parareal_config();
  const int cores = available_cores();
  StudyOutput out;
  RunRecord rec;
  rec.mode = to_string(cfg.mode);
  rec.threads = pc.threads_per_worker;
  rec.omega = pc.problem.omega;

  switch (cfg.mode) {
    case Mode::serial_fine: {
      const SerialRun s = run_serial_fine(pc);
      rec.wall_seconds = s.wall_seconds;
      rec.tau_f = s.timing.per_step();
      rec.eps_fine = relative_error(s.u, pc.problem.T, pc.problem);
      rec.oversubscribed = pc.threads_per_worker > cores;
      log << "serial fine: " << s.timing.steps << " steps in " << s.wall_seconds << " s, error vs exact "
          << rec.eps_fine << "\n";
      break;
    }
    case Mode::serial_coarse: {
      const SerialRun s = run_serial_coarse(pc);
      rec.wall_seconds = s.wall_seconds;
      rec.tau_c = s.timing.per_step();
      rec.eps_fine = relative_error(s.u, pc.problem.T, pc.problem);
      rec.oversubscribed = pc.threads_per_worker > cores;
      log << "serial coarse: " << s.timing.steps << " steps in " << s.wall_seconds << " s, error vs exact "
          << rec.eps_fine << "\n";
      break;
    }
    case Mode::parareal: {
      const SerialRun fine = run_serial_fine(pc);
      const PararealResult r = run_parareal(pc);
      rec.n_p = pc.n_slices;
      rec.k = r.iterations();
      rec.wall_seconds = r.wall_seconds;
      rec.tau_f = fine.timing.per_step();
      rec.defect_series = defect_series(r, fine.u);
      rec.eps_fine = relative_error(fine.u, pc.problem.T, pc.problem);
      rec.speedup = fine.wall_seconds / r.wall_seconds;
      rec.efficiency = rec.speedup / pc.n_slices;
      rec.oversubscribed = pc.n_slices * pc.threads_per_worker > cores;
      log << "parareal: N_p=" << pc.n_slices << " K=" << rec.k << " in " << r.wall_seconds
          << " s (serial fine " << fine.wall_seconds << " s)\n";
      for (std::size_t k = 0; k < rec.defect_series.size(); ++k)
        log << "  d^" << k << " = " << rec.defect_series[k] << "\n";
      log << "  eps_fine = " << rec.eps_fine << "\n";
      break;
    }
    default:
      throw ConfigError(std::string("mode ") + to_string(cfg.mode) + " is not a single run");
  }
  out.records.push_back(rec);
  out.table = run_records_table(out.records);
  return out;
}

StudyOutput cmd_convergence(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  StudyOutput out;
  out.table.header = {"n_p", "omega", "k", "defect"};
  for (int n_p : cfg.slice_sweep) {
    for (double omega : cfg.omega_sweep) {
      PararealConfig pc = forced_iterations(cfg.parareal_config());
      pc.n_slices = n_p;
      pc.problem.omega = omega;
      const SerialRun fine = run_serial_fine(pc);
      const SerialRun coarse = run_serial_coarse(pc);
      const PararealResult r = run_parareal(pc);
      const ConvergenceReport rep = make_convergence_report(r, fine.u, coarse.u, pc.problem);

      if (!r.final_iterates.front().interior_equals(coarse.u))
        out.warnings.push_back("N_p=" + std::to_string(n_p) + " omega=" + format_double(omega) +
                               ": d^0 iterate differs from the standalone coarse run");
      for (std::size_t k = 0; k < rep.defects.size(); ++k)
        out.table.rows.push_back({std::to_string(n_p), format_double(omega), std::to_string(k),
                                  format_double(rep.defects[k])});

      RunRecord rec;
      rec.mode = to_string(Mode::convergence_study);
      rec.n_p = n_p;
      rec.k = r.iterations();
      rec.threads = pc.threads_per_worker;
      rec.omega = omega;
      rec.wall_seconds = r.wall_seconds;
      rec.defect_series = rep.defects;
      rec.eps_fine = rep.eps_fine;
      out.records.push_back(rec);

      log << "N_p=" << n_p << " omega=" << omega << " eps_fine=" << rep.eps_fine
          << " fine accuracy at k=" << rep.iterations_to_fine_accuracy << "\n";
      for (std::size_t k = 0; k < rep.defects.size(); ++k) log << "  d^" << k << " = " << rep.defects[k] << "\n";
    }
  }
  return out;
}

StudyOutput cmd_speedup(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  const int cores = available_cores();
  const PowerProfile power = cfg.power();
  StudyOutput out;
  out.table.header = {"n_p",        "k",     "threads", "serial_seconds", "parareal_seconds", "tau_f",
                      "tau_c",      "s_bound", "s_measured", "e_bound",   "e_measured",       "oversubscribed"};
  for (int n_p : cfg.slice_sweep) {
    PararealConfig pc = forced_iterations(cfg.parareal_config());
    pc.n_slices = n_p;
    const PropagatorTimings tau = measure_step_costs(pc, cfg.repetitions);
    const SerialRun fine = run_serial_fine(pc);
    const PararealResult r = run_parareal(pc);

    PerfParams pp;
    pp.n_p = n_p;
    pp.k = pc.k_max;
    pp.n_f = pc.fine_steps_per_slice();
    pp.n_c = pc.coarse_steps_per_slice();
    pp.tau_f = tau.tau_f;
    pp.tau_c = cfg.tau_ratio ? *cfg.tau_ratio * tau.tau_f : tau.tau_c;
    const double s_bound = speedup_bound(pp).s_bound;
    const double s_measured = fine.wall_seconds / r.wall_seconds;
    const Efficiencies eff = efficiencies(pp, s_measured);
    const bool over = n_p * pc.threads_per_worker > cores;

    out.table.rows.push_back({std::to_string(n_p), std::to_string(pc.k_max), std::to_string(pc.threads_per_worker),
                              format_double(fine.wall_seconds), format_double(r.wall_seconds),
                              format_double(pp.tau_f), format_double(pp.tau_c), format_double(s_bound),
                              format_double(s_measured), format_double(eff.e_bound), format_double(eff.e_measured),
                              over ? "1" : "0"});

    const EnergyReport energy = energy_model({power, fine.wall_seconds, r.wall_seconds, n_p}, s_bound);
    RunRecord rec;
    rec.mode = to_string(Mode::speedup_study);
    rec.n_p = n_p;
    rec.k = pc.k_max;
    rec.threads = pc.threads_per_worker;
    rec.omega = pc.problem.omega;
    rec.wall_seconds = r.wall_seconds;
    rec.tau_f = pp.tau_f;
    rec.tau_c = pp.tau_c;
    rec.defect_series = defect_series(r, fine.u);
    rec.eps_fine = relative_error(fine.u, pc.problem.T, pc.problem);
    rec.speedup = s_measured;
    rec.efficiency = eff.e_measured;
    rec.energy_joules = energy.q_parallel;
    rec.gamma = energy.gamma_measured;
    rec.oversubscribed = over;
    out.records.push_back(rec);

    if (!over && s_measured > 1.15 * s_bound)
      out.warnings.push_back("N_p=" + std::to_string(n_p) + ": measured speedup " + fmt("%.3f", s_measured) +
                             " exceeds the bound " + fmt("%.3f", s_bound) + " by more than 15%");
    if (over)
      out.warnings.push_back("N_p=" + std::to_string(n_p) + " with " + std::to_string(pc.threads_per_worker) +
                             " thread(s) per worker oversubscribes " + std::to_string(cores) + " core(s)");
  }
  print_speedup_table(out.table, log);
  return out;
}

void print_speedup_table(const CsvTable& t, std::ostream& out) {
  const auto c_np = t.column("n_p"), c_sb = t.column("s_bound"), c_sm = t.column("s_measured"),
             c_eb = t.column("e_bound"), c_em = t.column("e_measured"), c_ov = t.column("oversubscribed");
  char line[160];
  std::snprintf(line, sizeof line, "%6s | %8s %10s | %8s %10s\n", "N_p", "S_bound", "S_measured", "E_bound",
                "E_measured");
  out << line;
  for (const auto& row : t.rows) {
    std::snprintf(line, sizeof line, "%6s | %8.1f %10.1f | %8s %10s%s\n", row[c_np].c_str(),
                  parse_double_field(row[c_sb]), parse_double_field(row[c_sm]),
                  format_percent(parse_double_field(row[c_eb])).c_str(),
                  format_percent(parse_double_field(row[c_em])).c_str(), row[c_ov] == "1" ? "  (oversubscribed)" : "");
    out << line;
  }
}

StudyOutput cmd_thread_sweep(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  const int cores = available_cores();
  StudyOutput out;
  out.table.header = {"n_p", "threads", "wall_seconds", "speedup", "identical", "oversubscribed"};

  std::vector<int> threads = cfg.thread_sweep;
  if (std::find(threads.begin(), threads.end(), 1) == threads.end()) threads.insert(threads.begin(), 1);
  std::sort(threads.begin(), threads.end());
  threads.erase(std::unique(threads.begin(), threads.end()), threads.end());

  PararealConfig pc = forced_iterations(cfg.parareal_config());
  std::optional<Field3> reference;
  double base_seconds = 0.0;
  double previous = 0.0;
  for (int t : threads) {
    pc.threads_per_worker = t;
    const PararealResult r = run_parareal(pc);
    bool identical = true;
    if (!reference) {
      reference = r.final_field();
      base_seconds = r.wall_seconds;
    } else {
      identical = r.final_field().interior_equals(*reference);
    }
    const double speedup = base_seconds / r.wall_seconds;
    const bool over = pc.n_slices * t > cores;
    out.table.rows.push_back({std::to_string(pc.n_slices), std::to_string(t), format_double(r.wall_seconds),
                              format_double(speedup), identical ? "1" : "0", over ? "1" : "0"});

    RunRecord rec;
    rec.mode = to_string(Mode::thread_sweep);
    rec.n_p = pc.n_slices;
    rec.k = r.iterations();
    rec.threads = t;
    rec.omega = pc.problem.omega;
    rec.wall_seconds = r.wall_seconds;
    rec.speedup = speedup;
    rec.efficiency = speedup / t;
    rec.oversubscribed = over;
    out.records.push_back(rec);

    if (!identical)
      out.warnings.push_back("threads=" + std::to_string(t) + ": solution differs bitwise from threads=1");
    if (previous > 0.0 && speedup < previous && !over)
      out.warnings.push_back("speedup drops from " + fmt("%.3f", previous) + " to " + fmt("%.3f", speedup) +
                             " at threads=" + std::to_string(t));
    previous = speedup;
    log << "threads=" << t << " wall=" << r.wall_seconds << " s speedup=" << speedup
        << (identical ? "" : " (NOT bitwise identical)") << (over ? " (oversubscribed)" : "") << "\n";
  }
  return out;
}

StudyOutput cmd_energy(const ExperimentConfig& cfg, std::ostream& log) {
  cfg.validate();
  if (cfg.timings_path.empty() || !std::filesystem::exists(cfg.timings_path))
    throw MissingTimingsError("energy report needs the timings of a prior `speedup` run; " +
                              (cfg.timings_path.empty() ? std::string("no `timings` path given")
                                                        : "'" + cfg.timings_path + "' does not exist"));
  const CsvTable timings = read_csv_file(cfg.timings_path);
  std::size_t c_np, c_k, c_th, c_ts, c_tp, c_sb;
  try {
    c_np = timings.column("n_p");
    c_k = timings.column("k");
    c_th = timings.column("threads");
    c_ts = timings.column("serial_seconds");
    c_tp = timings.column("parareal_seconds");
    c_sb = timings.column("s_bound");
  } catch (const std::out_of_range& e) {
    throw MissingTimingsError("'" + cfg.timings_path + "' is not the output of a `speedup` run: " + e.what());
  }

  const PowerProfile power = cfg.power();
  StudyOutput out;
  out.table.header = {"n_p",      "power_per_node", "node",           "network",     "blower",     "device",
                      "q_serial", "q_parallel",     "gamma_measured", "gamma_ideal", "gamma_bound"};
  log << "per-node power " << power.total() << " W\n";
  for (const auto& row : timings.rows) {
    const int n_p = std::stoi(row[c_np]);
    const double s_bound = parse_double_field(row[c_sb]);
    const EnergyReport e =
        energy_model({power, parse_double_field(row[c_ts]), parse_double_field(row[c_tp]), n_p}, s_bound);
    out.table.rows.push_back({row[c_np], format_double(e.power_per_node), format_double(e.q_node),
                              format_double(e.q_network), format_double(e.q_blower), format_double(e.q_device),
                              format_double(e.q_serial), format_double(e.q_parallel), format_double(e.gamma_measured),
                              format_double(e.gamma_ideal), format_double(e.gamma_bound)});
    RunRecord rec;
    rec.mode = to_string(Mode::energy_report);
    rec.n_p = n_p;
    rec.k = std::stoi(row[c_k]);
    rec.threads = std::stoi(row[c_th]);
    rec.wall_seconds = parse_double_field(row[c_tp]);
    rec.speedup = e.s_p;
    rec.efficiency = e.e_p;
    rec.energy_joules = e.q_parallel;
    rec.gamma = e.gamma_measured;
    out.records.push_back(rec);

    const double ratio = e.gamma_measured / e.gamma_bound;
    if (ratio < 0.7 || ratio > 1.3)
      out.warnings.push_back("N_p=" + row[c_np] + ": gamma_measured/gamma_bound = " + fmt("%.3f", ratio) +
                             " outside [0.7, 1.3]");
    log << "N_p=" << n_p << " Q_p=" << e.q_parallel << " J gamma_measured=" << e.gamma_measured
        << " gamma_bound=" << e.gamma_bound << "\n";
  }
  return out;
}

std::vector<CheckResult> cmd_selftest(std::ostream& log) {
  std::vector<CheckResult> checks;
  auto check = [&](std::string name, bool ok, std::string detail) {
    checks.push_back({std::move(name), ok ? CheckResult::Status::pass : CheckResult::Status::fail, std::move(detail)});
    log << to_string(checks.back().status) << "  " << checks.back().name << ": " << checks.back().detail << "\n";
  };

  {
    const double p_cpu = PowerProfile::cpu_default().total();
    const double p_gpu = PowerProfile::gpu_default().total();
    check("power totals", std::abs(p_cpu - 172.0) <= 1.0 && std::abs(p_gpu - 245.0) <= 1.0,
          fmt("cpu %.0f W", p_cpu) + fmt(", gpu %.0f W", p_gpu));
  }
  {
    const double r = back_solve_tau_ratio(4.0 * 0.326, 4, 3, 1.0 / 16.0);
    const double s128 = speedup_bound_from_ratio(128, 3, 1.0 / 16.0, r);
    check("speedup model", std::abs(s128 - 29.8) <= 0.3, fmt("S_bound(128) = %.2f", s128));
  }
  {
    // amplitude against RK4 on a' = -12 pi^2 nu(t) a
    const double nu0 = 0.1, omega = 100.0, T = 0.1;
    const int n = 20000;
    const double h = T / n, kk = -12.0 * M_PI * M_PI;
    auto rate = [&](double t) { return kk * (nu0 + 0.5 * nu0 * std::sin(omega * t)); };
    double a = 1.0;
    for (int i = 0; i < n; ++i) {
      const double t = i * h;
      const double k1 = rate(t) * a, k2 = rate(t + h / 2) * (a + h / 2 * k1), k3 = rate(t + h / 2) * (a + h / 2 * k2),
                   k4 = rate(t + h) * (a + h * k3);
      a += h / 6 * (k1 + 2 * k2 + 2 * k3 + k4);
    }
    const double rel = std::abs(amplitude(T, nu0, omega) - a) / a;
    check("amplitude", rel <= 1e-10, fmt("relative difference %.2e", rel));
  }
  {
    PararealConfig pc;
    pc.n_slices = 4;
    pc.k_max = 4;
    pc.problem.grid = GridSpec::cube(8);
    pc.problem.fine_steps = 64;
    pc.problem.coarse_steps = 16;
    pc.problem.omega = 100.0;
    const SerialRun fine = run_serial_fine(pc);
    const PararealResult r = run_parareal(pc);
    const auto d = defect_series(r, fine.u);
    check("finite-step exactness", d.back() <= 1e-10, fmt("d^K = %.2e", d.back()));
    bool decreasing = true;
    for (std::size_t k = 1; k < d.size() - 1; ++k) decreasing = decreasing && d[k] < d[k - 1];
    check("defects decrease", decreasing, fmt("d^1 = %.2e", d.size() > 1 ? d[1] : 0.0));
    pc.transport = TransportKind::multi_process;
    const PararealResult m = run_parareal(pc);
    check("multi-process transport", m.final_field().interior_equals(r.final_field()),
          "final field bitwise equal to in-process");
  }
  return checks;
}

void write_outputs(const ExperimentConfig& cfg, const StudyOutput& out) {
  if (cfg.output_path.empty()) return;
  const std::string& path = cfg.output_path;
  write_csv_file(path, out.table);
  write_csv_file(path + ".records.csv", run_records_table(out.records));
  {
    std::ofstream conf(path + ".config");
    if (!conf) throw std::runtime_error("cannot write '" + path + ".config'");
    conf << to_config_text(cfg);
  }
  if (cfg.json_summary) {
    nlohmann::json j;
    j["mode"] = to_string(cfg.mode);
    j["warnings"] = out.warnings;
    j["columns"] = out.table.header;
    j["rows"] = out.table.rows;
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& r : out.records)
      recs.push_back({{"mode", r.mode},
                      {"n_p", r.n_p},
                      {"k", r.k},
                      {"threads", r.threads},
                      {"omega", r.omega},
                      {"wall_seconds", r.wall_seconds},
                      {"tau_f", r.tau_f},
                      {"tau_c", r.tau_c},
                      {"defect_series", r.defect_series},
                      {"eps_fine", r.eps_fine},
                      {"speedup", r.speedup},
                      {"efficiency", r.efficiency},
                      {"energy_joules", r.energy_joules},
                      {"gamma", r.gamma},
                      {"oversubscribed", r.oversubscribed}});
    j["records"] = recs;
    std::ofstream js(path + ".json");
    if (!js) throw std::runtime_error("cannot write '" + path + ".json'");
    js << j.dump(2) << "\n";
  }
}

}  // namespace parastencil
