#pragma once

#include <condition_variable>
#include <cstddef>
#include <exception>
#include <functional>
#include <mutex>
#include <thread>
#include <vector>

namespace parastencil {

/// Fixed-size pool of data-parallel lanes. parallel_for splits [0, n) into
/// one contiguous block per lane and blocks until every block is done.
/// A single-lane executor runs inline on the calling thread.
///
/// One executor belongs to one caller at a time; parallel_for is not
/// reentrant.
class Executor {
 public:
  explicit Executor(int lanes = 1);
  ~Executor();

  Executor(const Executor&) = delete;
  Executor& operator=(const Executor&) = delete;

  int lanes() const { return lanes_; }

  void parallel_for(std::size_t n, const std::function<void(std::size_t, std::size_t)>& body);

  /// Shared single-lane executor for callers that do not care.
  static Executor& serial();

 private:
  void worker_loop(int lane);

  int lanes_;
  std::vector<std::thread> threads_;
  std::mutex mutex_;
  std::condition_variable start_cv_;
  std::condition_variable done_cv_;
  const std::function<void(std::size_t, std::size_t)>* body_ = nullptr;
  std::size_t n_ = 0;
  unsigned long generation_ = 0;
  int pending_ = 0;
  bool stop_ = false;
  std::exception_ptr error_;
};

}  // namespace parastencil
