#include "parastencil/transport.hpp"

#include <poll.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <vector>

#include "parastencil/wire.hpp"

namespace parastencil {

class HubEndpoint : public Transport {
 public:
  HubEndpoint(ChannelHub& hub, int rank) : hub_(hub), rank_(rank) {}

  int rank() const override { return rank_; }
  void send(int dest, const Message& msg) override { hub_.deliver(rank_, dest, msg); }
  Message recv(int src, std::uint64_t tag) override { return hub_.take(src, rank_, tag); }

 private:
  ChannelHub& hub_;
  int rank_;
};

ChannelHub::ChannelHub(int n_ranks, Timeout timeout) : n_ranks_(n_ranks), timeout_(timeout) {
  if (n_ranks < 1) throw std::invalid_argument("channel hub needs at least one rank");
}

std::unique_ptr<Transport> ChannelHub::endpoint(int rank) {
  if (rank < 0 || rank >= n_ranks_) throw std::out_of_range("rank out of range");
  return std::make_unique<HubEndpoint>(*this, rank);
}

ChannelHub::Channel& ChannelHub::channel(int src, int dest) {
  if (src < 0 || src >= n_ranks_ || dest < 0 || dest >= n_ranks_)
    throw TransportError("no link " + std::to_string(src) + " -> " + std::to_string(dest));
  std::lock_guard lock(map_mutex_);
  auto& slot = channels_[{src, dest}];
  if (!slot) slot = std::make_unique<Channel>();
  return *slot;
}

bool ChannelHub::aborted(std::string* reason) {
  std::lock_guard lock(abort_mutex_);
  if (abort_reason_ && reason) *reason = *abort_reason_;
  return abort_reason_.has_value();
}

void ChannelHub::abort(const std::string& reason) {
  {
    std::lock_guard lock(abort_mutex_);
    if (!abort_reason_) abort_reason_ = reason;
  }
  std::lock_guard lock(map_mutex_);
  for (auto& [key, ch] : channels_) {
    std::lock_guard ch_lock(ch->mutex);
    ch->cv.notify_all();
  }
}

namespace {

template <class Pred>
bool wait_for(std::condition_variable& cv, std::unique_lock<std::mutex>& lock, const Timeout& timeout,
              Pred pred) {
  if (!timeout) {
    cv.wait(lock, pred);
    return true;
  }
  return cv.wait_for(lock, *timeout, pred);
}

}  // namespace

void ChannelHub::deliver(int src, int dest, const Message& msg) {
  Channel& ch = channel(src, dest);
  std::unique_lock lock(ch.mutex);
  std::string reason;
  if (aborted(&reason)) throw TransportError("transport aborted: " + reason);
  ch.queue.push_back(msg);
  const std::uint64_t ticket = ++ch.sent;
  ch.cv.notify_all();
  const bool ok = wait_for(ch.cv, lock, timeout_, [&] { return ch.taken >= ticket || aborted(); });
  if (ch.taken >= ticket) return;
  if (!ok) throw TransportError("send " + std::to_string(src) + " -> " + std::to_string(dest) + " timed out");
  aborted(&reason);
  throw TransportError("transport aborted: " + reason);
}

Message ChannelHub::take(int src, int dest, std::uint64_t tag) {
  Channel& ch = channel(src, dest);
  std::unique_lock lock(ch.mutex);
  const bool ok = wait_for(ch.cv, lock, timeout_, [&] { return !ch.queue.empty() || aborted(); });
  if (ch.queue.empty()) {
    if (!ok)
      throw TransportError("recv " + std::to_string(src) + " -> " + std::to_string(dest) + " timed out");
    std::string reason;
    aborted(&reason);
    throw TransportError("transport aborted: " + reason);
  }
  Message msg = std::move(ch.queue.front());
  ch.queue.pop_front();
  ++ch.taken;
  ch.cv.notify_all();
  if (msg.tag != tag)
    throw TransportError("expected tag " + std::to_string(tag) + " from rank " + std::to_string(src) +
                         ", got " + std::to_string(msg.tag));
  return msg;
}

void write_all(int fd, const void* data, std::size_t n) {
  const char* p = static_cast<const char*>(data);
  while (n > 0) {
    const ssize_t w = ::send(fd, p, n, MSG_NOSIGNAL);
    if (w < 0) {
      if (errno == EINTR) continue;
      throw TransportError(std::string("socket write failed: ") + std::strerror(errno));
    }
    p += w;
    n -= static_cast<std::size_t>(w);
  }
}

void read_exact(int fd, void* data, std::size_t n, Timeout timeout) {
  char* p = static_cast<char*>(data);
  while (n > 0) {
    pollfd pfd{fd, POLLIN, 0};
    const int wait_ms = timeout ? static_cast<int>(timeout->count()) : -1;
    const int ready = ::poll(&pfd, 1, wait_ms);
    if (ready < 0) {
      if (errno == EINTR) continue;
      throw TransportError(std::string("poll failed: ") + std::strerror(errno));
    }
    if (ready == 0) throw TransportError("socket read timed out");
    const ssize_t r = ::read(fd, p, n);
    if (r < 0) {
      if (errno == EINTR) continue;
      throw TransportError(std::string("socket read failed: ") + std::strerror(errno));
    }
    if (r == 0) throw TransportError("peer closed the connection");
    p += r;
    n -= static_cast<std::size_t>(r);
  }
}

SocketTransport::SocketTransport(int rank, const GridSpec& grid, int fd_from_prev, int fd_to_next,
                                 Timeout timeout)
    : rank_(rank), grid_(grid), fd_prev_(fd_from_prev), fd_next_(fd_to_next), timeout_(timeout) {}

void SocketTransport::send(int dest, const Message& msg) {
  if (dest != rank_ + 1 || fd_next_ < 0)
    throw TransportError("rank " + std::to_string(rank_) + " has no link to " + std::to_string(dest));
  const auto bytes = wire::encode_field(msg.field, msg.tag, msg.sender_finished ? wire::kFlagFinished : 0u);
  write_all(fd_next_, bytes.data(), bytes.size());
}

Message SocketTransport::recv(int src, std::uint64_t tag) {
  if (src != rank_ - 1 || fd_prev_ < 0)
    throw TransportError("rank " + std::to_string(rank_) + " has no link from " + std::to_string(src));
  std::array<std::byte, wire::kHeaderSize> head{};
  read_exact(fd_prev_, head.data(), head.size(), timeout_);
  const wire::Header h = wire::decode_header(head);
  std::vector<std::byte> payload(h.payload_bytes());
  read_exact(fd_prev_, payload.data(), payload.size(), timeout_);
  Message msg{h.tag, (h.flags & wire::kFlagFinished) != 0, Field3(grid_)};
  wire::decode_payload(h, payload, msg.field);
  if (msg.tag != tag)
    throw TransportError("expected tag " + std::to_string(tag) + " from rank " + std::to_string(src) +
                         ", got " + std::to_string(msg.tag));
  return msg;
}

}  // namespace parastencil
