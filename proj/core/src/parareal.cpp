#include "parastencil/parareal.hpp"

#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <chrono>
#include <csignal>
#include <cstring>
#include <memory>
#include <mutex>
#include <thread>

#include "parastencil/wire.hpp"

namespace parastencil {

const char* to_string(TransportKind kind) {
  return kind == TransportKind::in_process ? "in_process" : "multi_process";
}

TransportKind transport_from_string(const std::string& name) {
  if (name == "in_process") return TransportKind::in_process;
  if (name == "multi_process") return TransportKind::multi_process;
  throw std::invalid_argument("unknown transport '" + name + "' (in_process | multi_process)");
}

SliceInterval PararealConfig::slice(int p, PropagatorKind kind) const {
  const double t0 = problem.T * p / n_slices;
  const double t1 = problem.T * (p + 1) / n_slices;
  return {t0, t1, kind == PropagatorKind::fine_rk4 ? fine_steps_per_slice() : coarse_steps_per_slice()};
}

Timeout PararealConfig::effective_timeout() const {
  if (recv_timeout_seconds)
    return std::chrono::milliseconds(static_cast<long long>(*recv_timeout_seconds * 1000.0));
  if (transport == TransportKind::multi_process) return std::chrono::milliseconds(60'000);
  return std::nullopt;
}

void PararealConfig::validate() const {
  problem.validate();
  if (n_slices < 1) throw std::invalid_argument("n_slices must be >= 1");
  if (k_max < 1) throw std::invalid_argument("k_max must be >= 1");
  if (threads_per_worker < 1) throw std::invalid_argument("threads_per_worker must be >= 1");
  if (problem.fine_steps % n_slices != 0)
    throw std::invalid_argument("fine step count " + std::to_string(problem.fine_steps) +
                                " is not divisible by n_slices " + std::to_string(n_slices));
  if (problem.coarse_steps % n_slices != 0)
    throw std::invalid_argument("coarse step count " + std::to_string(problem.coarse_steps) +
                                " is not divisible by n_slices " + std::to_string(n_slices));
  if (stop_tolerance && !(*stop_tolerance >= 0.0)) throw std::invalid_argument("stop_tolerance must be >= 0");
}

PararealError::PararealError(int rank, int iteration, const std::string& what)
    : std::runtime_error("rank " + std::to_string(rank) + ", iteration " + std::to_string(iteration) + ": " +
                         what),
      rank_(rank),
      iteration_(iteration) {}

namespace {

std::vector<double> max_over_ranks(const std::vector<RankMonitor>& ranks,
                                   std::vector<double> RankMonitor::*series) {
  std::size_t n = 0;
  for (const auto& r : ranks) n = std::max(n, (r.*series).size());
  std::vector<double> out(n, 0.0);
  for (const auto& r : ranks)
    for (std::size_t k = 0; k < (r.*series).size(); ++k) out[k] = std::max(out[k], (r.*series)[k]);
  return out;
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

SerialRun run_serial(const PararealConfig& cfg, PropagatorKind kind) {
  cfg.validate();
  Executor ex(cfg.threads_per_worker);
  Propagator prop(kind, cfg.problem, ex);
  SerialRun run{initial_condition(cfg.problem.grid), 0.0, {}};
  const auto start = std::chrono::steady_clock::now();
  for (int n = 0; n < cfg.n_slices; ++n) prop.advance(run.u, cfg.slice(n, kind));
  run.wall_seconds = seconds_since(start);
  run.timing = prop.timing();
  return run;
}

}  // namespace

std::vector<double> PararealResult::max_residuals() const {
  return max_over_ranks(ranks, &RankMonitor::residuals);
}

std::vector<double> PararealResult::max_iterate_changes() const {
  return max_over_ranks(ranks, &RankMonitor::iterate_changes);
}

SerialRun run_serial_fine(const PararealConfig& cfg) { return run_serial(cfg, PropagatorKind::fine_rk4); }

SerialRun run_serial_coarse(const PararealConfig& cfg) { return run_serial(cfg, cfg.coarse_kind()); }

SliceWorker::SliceWorker(int rank, const PararealConfig& cfg, Executor& ex)
    : rank_(rank),
      cfg_(cfg),
      u0_(cfg.problem.grid),
      u_start_(cfg.problem.grid),
      coarse_(cfg.problem.grid),
      fine_(cfg.problem.grid),
      out_(cfg.problem.grid),
      coarse_prop_(cfg.coarse_kind(), cfg.problem, ex),
      fine_prop_(PropagatorKind::fine_rk4, cfg.problem, ex),
      predecessor_finished_(rank == 0) {
  if (rank < 0 || rank >= cfg.n_slices) throw std::out_of_range("rank out of range");
  monitor_.rank = rank;
}

void SliceWorker::init(const Field3& u0) {
  u0_ = u0;
  u_start_ = u0;
  for (int n = 0; n < rank_; ++n) coarse_prop_.advance(u_start_, cfg_.slice(n, cfg_.coarse_kind()));
  coarse_ = u_start_;
  coarse_prop_.advance(coarse_, cfg_.slice(rank_, cfg_.coarse_kind()));
  out_ = coarse_;
  monitor_.coarse_seconds = coarse_prop_.timing().seconds;
}

const Field3& SliceWorker::iterate(int k, Transport* transport) {
  if (finished_) throw std::logic_error("iterate called on a finished worker");
  const SliceInterval fine_slice = cfg_.slice(rank_, PropagatorKind::fine_rk4);
  const SliceInterval coarse_slice = cfg_.slice(rank_, cfg_.coarse_kind());
  const std::uint64_t tag = static_cast<std::uint64_t>(k) + 1;

  fine_ = u_start_;
  fine_prop_.advance(fine_, fine_slice);

  bool received = false;
  if (rank_ > 0 && !predecessor_finished_) {
    if (!transport) throw std::logic_error("rank > 0 needs a transport");
    Message msg = transport->recv(rank_ - 1, tag);
    u_start_ = std::move(msg.field);
    predecessor_finished_ = msg.sender_finished;
    received = true;
  }
  // rank 0 keeps u0 and a finished predecessor sends nothing more, so the
  // input and hence G of it are unchanged

  Field3 coarse_new = coarse_;
  if (received) {
    coarse_new = u_start_;
    coarse_prop_.advance(coarse_new, coarse_slice);
  }

  Field3 out_new(out_.spec());
  axpy3(1.0, coarse_new, 1.0, fine_, -1.0, coarse_, out_new);

  monitor_.residuals.push_back(inf_norm_diff(fine_, out_));
  const double change = inf_norm_diff(out_new, out_);
  monitor_.iterate_changes.push_back(change);

  coarse_ = std::move(coarse_new);
  out_ = std::move(out_new);
  ++iterations_;
  monitor_.iterations = iterations_;
  monitor_.fine_seconds = fine_prop_.timing().seconds;
  monitor_.coarse_seconds = coarse_prop_.timing().seconds;

  if (cfg_.stop_tolerance && predecessor_finished_) {
    const double scale = inf_norm(out_);
    finished_ = change <= *cfg_.stop_tolerance * (scale > 0.0 ? scale : 1.0);
  }

  if (rank_ < cfg_.n_slices - 1) {
    if (!transport) throw std::logic_error("rank < N_p - 1 needs a transport");
    transport->send(rank_ + 1, Message{tag, finished_, out_});
  }
  return out_;
}

namespace {

// Runs the whole life of one rank. Records iterates on the last rank.
void run_rank(const PararealConfig& cfg, int rank, Transport* transport, RankMonitor& monitor,
              std::vector<Field3>* iterates, int& iteration) {
  const auto start = std::chrono::steady_clock::now();
  Executor ex(cfg.threads_per_worker);
  SliceWorker worker(rank, cfg, ex);
  iteration = -1;
  worker.init(initial_condition(cfg.problem.grid));
  if (iterates) iterates->push_back(worker.end_value());
  for (int k = 0; k < cfg.k_max && !worker.finished(); ++k) {
    iteration = k;
    worker.iterate(k, transport);
    if (iterates) iterates->push_back(worker.end_value());
  }
  monitor = worker.monitor();
  monitor.wall_seconds = seconds_since(start);
}

PararealResult run_in_process(const PararealConfig& cfg) {
  const int np = cfg.n_slices;
  ChannelHub hub(np, cfg.effective_timeout());
  PararealResult result;
  result.ranks.resize(np);
  std::vector<int> iteration(np, -1);
  std::mutex error_mutex;
  std::optional<PararealError> first_error;
  bool first_is_abort = true;

  const auto start = std::chrono::steady_clock::now();
  std::vector<std::thread> threads;
  threads.reserve(np);
  for (int p = 0; p < np; ++p) {
    threads.emplace_back([&, p] {
      auto endpoint = hub.endpoint(p);
      try {
        run_rank(cfg, p, endpoint.get(), result.ranks[p], p == np - 1 ? &result.final_iterates : nullptr,
                 iteration[p]);
      } catch (const std::exception& e) {
        const bool is_abort = std::string_view(e.what()).starts_with("transport aborted");
        {
          std::lock_guard lock(error_mutex);
          // keep the root cause rather than the aborts it triggers downstream
          if (!first_error || (first_is_abort && !is_abort)) {
            first_error.emplace(p, iteration[p], e.what());
            first_is_abort = is_abort;
          }
        }
        hub.abort("rank " + std::to_string(p) + " failed");
      }
    });
  }
  for (auto& t : threads) t.join();
  result.wall_seconds = seconds_since(start);
  if (first_error) throw *first_error;
  return result;
}

// Per-rank result record written by a child process to its parent:
//   u32 status (0 ok, 1 failed), i32 iteration,
//   ok:     u32 iterations, f64 residuals[iterations], f64 changes[iterations],
//           f64 fine_s, f64 coarse_s, f64 wall_s, u32 n_fields, field messages
//   failed: u32 length, message bytes
void put_record_u32(std::vector<std::byte>& buf, std::uint32_t v) {
  buf.resize(buf.size() + 4);
  wire::put_u32(buf.data() + buf.size() - 4, v);
}

void put_record_f64(std::vector<std::byte>& buf, double v) {
  buf.resize(buf.size() + 8);
  wire::put_f64(buf.data() + buf.size() - 8, v);
}

std::uint32_t read_u32(int fd) {
  std::array<std::byte, 4> b{};
  read_exact(fd, b.data(), b.size(), std::nullopt);
  return wire::get_u32(b.data());
}

double read_f64(int fd) {
  std::array<std::byte, 8> b{};
  read_exact(fd, b.data(), b.size(), std::nullopt);
  return wire::get_f64(b.data());
}

[[noreturn]] void child_main(const PararealConfig& cfg, int rank, int fd_prev, int fd_next, int fd_result) {
  std::vector<std::byte> buf;
  int iteration = -1;
  int status = 0;
  try {
    SocketTransport transport(rank, cfg.problem.grid, fd_prev, fd_next, cfg.effective_timeout());
    RankMonitor monitor;
    std::vector<Field3> iterates;
    const bool last = rank == cfg.n_slices - 1;
    run_rank(cfg, rank, &transport, monitor, last ? &iterates : nullptr, iteration);
    put_record_u32(buf, 0);
    put_record_u32(buf, static_cast<std::uint32_t>(iteration));
    put_record_u32(buf, static_cast<std::uint32_t>(monitor.iterations));
    for (double r : monitor.residuals) put_record_f64(buf, r);
    for (double c : monitor.iterate_changes) put_record_f64(buf, c);
    put_record_f64(buf, monitor.fine_seconds);
    put_record_f64(buf, monitor.coarse_seconds);
    put_record_f64(buf, monitor.wall_seconds);
    put_record_u32(buf, static_cast<std::uint32_t>(iterates.size()));
    for (std::size_t k = 0; k < iterates.size(); ++k) {
      const auto msg = wire::encode_field(iterates[k], k);
      buf.insert(buf.end(), msg.begin(), msg.end());
    }
  } catch (const std::exception& e) {
    status = 3;
    buf.clear();
    put_record_u32(buf, 1);
    put_record_u32(buf, static_cast<std::uint32_t>(iteration));
    const std::string what = e.what();
    put_record_u32(buf, static_cast<std::uint32_t>(what.size()));
    const auto* chars = reinterpret_cast<const std::byte*>(what.data());
    buf.insert(buf.end(), chars, chars + what.size());
  }
  try {
    write_all(fd_result, buf.data(), buf.size());
  } catch (...) {
    status = 3;
  }
  ::_exit(status);
}

PararealResult run_multi_process(const PararealConfig& cfg) {
  const int np = cfg.n_slices;
  // link[p] carries p -> p+1: end 0 belongs to rank p, end 1 to rank p+1
  std::vector<std::array<int, 2>> link(np > 1 ? np - 1 : 0);
  std::vector<std::array<int, 2>> result_fd(np);
  auto close_fd = [](int& fd) {
    if (fd >= 0) ::close(fd);
    fd = -1;
  };
  auto make_pair = [](std::array<int, 2>& fds) {
    int raw[2];
    if (::socketpair(AF_UNIX, SOCK_STREAM, 0, raw) != 0)
      throw TransportError(std::string("socketpair failed: ") + std::strerror(errno));
    fds = {raw[0], raw[1]};
  };
  for (auto& l : link) make_pair(l);
  for (auto& r : result_fd) make_pair(r);

  const auto start = std::chrono::steady_clock::now();
  std::vector<pid_t> pids(np, -1);
  for (int p = 0; p < np; ++p) {
    const pid_t pid = ::fork();
    if (pid < 0) {
      for (pid_t c : pids)
        if (c > 0) ::kill(c, SIGKILL);
      throw TransportError(std::string("fork failed: ") + std::strerror(errno));
    }
    if (pid == 0) {
      const int fd_prev = p > 0 ? link[p - 1][1] : -1;
      const int fd_next = p < np - 1 ? link[p][0] : -1;
      const int fd_result = result_fd[p][1];
      for (int q = 0; q < np - 1; ++q)
        for (int& fd : link[q])
          if (fd != fd_prev && fd != fd_next) close_fd(fd);
      for (int q = 0; q < np; ++q)
        for (int& fd : result_fd[q])
          if (fd != fd_result) close_fd(fd);
      child_main(cfg, p, fd_prev, fd_next, fd_result);
    }
    pids[p] = pid;
  }
  for (auto& l : link) {
    close_fd(l[0]);
    close_fd(l[1]);
  }
  for (auto& r : result_fd) close_fd(r[1]);

  PararealResult result;
  result.ranks.resize(np);
  std::optional<PararealError> first_error;
  for (int p = 0; p < np; ++p) {
    const int fd = result_fd[p][0];
    try {
      const std::uint32_t status = read_u32(fd);
      const int iteration = static_cast<int>(read_u32(fd));
      if (status != 0) {
        const std::uint32_t len = read_u32(fd);
        std::string what(len, '\0');
        read_exact(fd, what.data(), len, std::nullopt);
        if (!first_error || std::string_view(first_error->what()).find("peer closed") != std::string_view::npos)
          first_error.emplace(p, iteration, what);
        continue;
      }
      RankMonitor& m = result.ranks[p];
      m.rank = p;
      m.iterations = static_cast<int>(read_u32(fd));
      m.residuals.resize(m.iterations);
      m.iterate_changes.resize(m.iterations);
      for (double& r : m.residuals) r = read_f64(fd);
      for (double& c : m.iterate_changes) c = read_f64(fd);
      m.fine_seconds = read_f64(fd);
      m.coarse_seconds = read_f64(fd);
      m.wall_seconds = read_f64(fd);
      const std::uint32_t n_fields = read_u32(fd);
      for (std::uint32_t k = 0; k < n_fields; ++k) {
        std::array<std::byte, wire::kHeaderSize> head{};
        read_exact(fd, head.data(), head.size(), std::nullopt);
        const wire::Header h = wire::decode_header(head);
        std::vector<std::byte> payload(h.payload_bytes());
        read_exact(fd, payload.data(), payload.size(), std::nullopt);
        Field3 f(cfg.problem.grid);
        wire::decode_payload(h, payload, f);
        result.final_iterates.push_back(std::move(f));
      }
    } catch (const std::exception& e) {
      if (!first_error) first_error.emplace(p, -1, std::string("lost worker process: ") + e.what());
    }
  }
  for (auto& r : result_fd) close_fd(r[0]);
  for (int p = 0; p < np; ++p) {
    int wstatus = 0;
    ::waitpid(pids[p], &wstatus, 0);
    if (!first_error && !(WIFEXITED(wstatus) && WEXITSTATUS(wstatus) == 0))
      first_error.emplace(p, -1, "worker process exited abnormally");
  }
  result.wall_seconds = seconds_since(start);
  if (first_error) throw *first_error;
  return result;
}

}  // namespace

PararealResult run_parareal(const PararealConfig& cfg) {
  cfg.validate();
  return cfg.transport == TransportKind::in_process ? run_in_process(cfg) : run_multi_process(cfg);
}

double defect(const Field3& u_parareal, const Field3& u_fine) {
  const double ref = inf_norm(u_fine);
  if (ref == 0.0) throw std::domain_error("defect: fine reference has zero norm");
  return inf_norm_diff(u_parareal, u_fine) / ref;
}

ConvergenceReport make_convergence_report(const PararealResult& result, const Field3& u_fine,
                                          const Field3& u_coarse, const ProblemSpec& problem) {
  ConvergenceReport rep;
  for (const auto& it : result.final_iterates) rep.defects.push_back(defect(it, u_fine));
  rep.eps_fine = relative_error(u_fine, problem.T, problem);
  rep.eps_coarse = relative_error(u_coarse, problem.T, problem);
  rep.eps_parareal = relative_error(result.final_field(), problem.T, problem);
  rep.fine_to_exact_norm_ratio = inf_norm(u_fine) / inf_norm(exact_solution(problem.grid, problem.T, problem));
  for (std::size_t k = 0; k < rep.defects.size(); ++k)
    if (rep.defects[k] <= rep.eps_fine) {
      rep.iterations_to_fine_accuracy = static_cast<int>(k);
      break;
    }
  return rep;
}

}  // namespace parastencil
