#include "parastencil/executor.hpp"

#include <algorithm>
#include <stdexcept>
#include <utility>

namespace parastencil {

namespace {

std::pair<std::size_t, std::size_t> block(std::size_t n, int lanes, int lane) {
  const std::size_t q = n / lanes, r = n % lanes;
  const std::size_t l = static_cast<std::size_t>(lane);
  const std::size_t begin = l * q + std::min(l, r);
  return {begin, begin + q + (l < r ? 1 : 0)};
}

}  // namespace

Executor::Executor(int lanes) : lanes_(lanes) {
  if (lanes < 1) throw std::invalid_argument("executor needs at least one lane");
  // lane 0 is the calling thread
  for (int lane = 1; lane < lanes_; ++lane) threads_.emplace_back([this, lane] { worker_loop(lane); });
}

Executor::~Executor() {
  {
    std::lock_guard lock(mutex_);
    stop_ = true;
  }
  start_cv_.notify_all();
  for (auto& t : threads_) t.join();
}

Executor& Executor::serial() {
  static thread_local Executor instance(1);
  return instance;
}

void Executor::parallel_for(std::size_t n,
                            const std::function<void(std::size_t, std::size_t)>& body) {
  if (n == 0) return;
  if (lanes_ == 1) {
    body(0, n);
    return;
  }
  {
    std::lock_guard lock(mutex_);
    body_ = &body;
    n_ = n;
    pending_ = lanes_ - 1;
    error_ = nullptr;
    ++generation_;
  }
  start_cv_.notify_all();

  std::exception_ptr own;
  try {
    const auto [b, e] = block(n, lanes_, 0);
    if (b < e) body(b, e);
  } catch (...) {
    own = std::current_exception();
  }

  std::unique_lock lock(mutex_);
  done_cv_.wait(lock, [this] { return pending_ == 0; });
  body_ = nullptr;
  if (own) std::rethrow_exception(own);
  if (error_) std::rethrow_exception(error_);
}

void Executor::worker_loop(int lane) {
  unsigned long seen = 0;
  for (;;) {
    const std::function<void(std::size_t, std::size_t)>* body;
    std::size_t n;
    {
      std::unique_lock lock(mutex_);
      start_cv_.wait(lock, [&] { return stop_ || generation_ != seen; });
      if (stop_) return;
      seen = generation_;
      body = body_;
      n = n_;
    }
    try {
      const auto [b, e] = block(n, lanes_, lane);
      if (b < e) (*body)(b, e);
    } catch (...) {
      std::lock_guard lock(mutex_);
      if (!error_) error_ = std::current_exception();
    }
    {
      std::lock_guard lock(mutex_);
      --pending_;
    }
    done_cv_.notify_one();
  }
}

}  // namespace parastencil
