#pragma once

#include <chrono>
#include <condition_variable>
#include <cstdint>
#include <deque>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>

#include "parastencil/grid.hpp"

namespace parastencil {

class TransportError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Message {
  std::uint64_t tag = 0;
  bool sender_finished = false;  // no further messages follow on this link
  Field3 field;
};

using Timeout = std::optional<std::chrono::milliseconds>;

/// Blocking point-to-point messaging seen from one rank. Messages between a
/// fixed (source, destination) pair arrive in send order. recv throws
/// TransportError if the next message from src carries a different tag.
class Transport {
 public:
  virtual ~Transport() = default;
  virtual int rank() const = 0;
  virtual void send(int dest, const Message& msg) = 0;
  virtual Message recv(int src, std::uint64_t tag) = 0;
};

/// Rendezvous channels between threads of one process: send returns once
/// the receiver has taken the message.
class ChannelHub {
 public:
  explicit ChannelHub(int n_ranks, Timeout timeout = std::nullopt);

  int size() const { return n_ranks_; }

  /// Wakes every blocked send/recv with a TransportError.
  void abort(const std::string& reason);

  std::unique_ptr<Transport> endpoint(int rank);

 private:
  friend class HubEndpoint;
  struct Channel {
    std::mutex mutex;
    std::condition_variable cv;
    std::deque<Message> queue;
    std::uint64_t sent = 0;
    std::uint64_t taken = 0;
  };

  Channel& channel(int src, int dest);
  void deliver(int src, int dest, const Message& msg);
  Message take(int src, int dest, std::uint64_t tag);
  bool aborted(std::string* reason = nullptr);

  int n_ranks_;
  Timeout timeout_;
  std::mutex map_mutex_;
  std::map<std::pair<int, int>, std::unique_ptr<Channel>> channels_;
  std::mutex abort_mutex_;
  std::optional<std::string> abort_reason_;
};

/// Stream-socket transport for a rank living in its own process. Only the
/// neighbour links rank-1 -> rank -> rank+1 exist; fds < 0 mark an absent link.
class SocketTransport : public Transport {
 public:
  SocketTransport(int rank, const GridSpec& grid, int fd_from_prev, int fd_to_next, Timeout timeout);

  int rank() const override { return rank_; }
  void send(int dest, const Message& msg) override;
  Message recv(int src, std::uint64_t tag) override;

 private:
  int rank_;
  GridSpec grid_;
  int fd_prev_;
  int fd_next_;
  Timeout timeout_;
};

/// Blocking helpers over a stream socket. read_exact throws TransportError on EOF,
/// error, or when the timeout elapses with no data.
void write_all(int fd, const void* data, std::size_t n);
void read_exact(int fd, void* data, std::size_t n, Timeout timeout);

}  // namespace parastencil
