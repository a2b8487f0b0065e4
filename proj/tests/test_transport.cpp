#include <gtest/gtest.h>
#include <sys/socket.h>
#include <unistd.h>

#include <cstring>
#include <thread>

#include "parastencil/transport.hpp"
#include "parastencil/wire.hpp"
#include "support/oracles.hpp"

using namespace parastencil;
using namespace std::chrono_literals;

TEST(Wire, HeaderLayoutIsLittleEndian) {
  const auto b = wire::encode_header({3, 4, 5, wire::kFlagFinished, 0x0102030405060708ull});
  EXPECT_EQ(std::memcmp(b.data(), "PARAREAL", 8), 0);
  EXPECT_EQ(b[8], std::byte{3});
  EXPECT_EQ(b[12], std::byte{4});
  EXPECT_EQ(b[16], std::byte{5});
  EXPECT_EQ(b[20], std::byte{1});
  EXPECT_EQ(b[24], std::byte{8});
  EXPECT_EQ(b[31], std::byte{1});
  const wire::Header h = wire::decode_header(b);
  EXPECT_EQ(h.tag, 0x0102030405060708ull);
  EXPECT_EQ(h.payload_bytes(), 3u * 4 * 5 * 8);
}

TEST(Wire, FieldRoundTripIsBitExact) {
  const GridSpec g(5, 3, 4);
  Field3 f = oracle::random_field(g, 77);
  f(0, 0, 0) = -0.0;
  f(1, 0, 0) = 5e-324;
  f(2, 0, 0) = std::numeric_limits<double>::max();
  const auto bytes = wire::encode_field(f, 9);
  ASSERT_EQ(bytes.size(), wire::kHeaderSize + g.interior_size() * 8);
  const wire::Header h = wire::decode_header(std::span(bytes).first(wire::kHeaderSize));
  Field3 out(g);
  wire::decode_payload(h, std::span(bytes).subspan(wire::kHeaderSize), out);
  EXPECT_TRUE(out.interior_equals(f));
  EXPECT_TRUE(std::signbit(out(0, 0, 0)));
}

TEST(Wire, RejectsBadMagicAndMismatchedExtents) {
  auto b = wire::encode_header({2, 2, 2, 0, 1});
  b[0] = std::byte{'X'};
  EXPECT_THROW(wire::decode_header(b), wire::WireError);
  const auto bytes = wire::encode_field(Field3(GridSpec::cube(2)), 1);
  const wire::Header h = wire::decode_header(std::span(bytes).first(wire::kHeaderSize));
  Field3 wrong(GridSpec::cube(3));
  EXPECT_THROW(wire::decode_payload(h, std::span(bytes).subspan(wire::kHeaderSize), wrong), wire::WireError);
  Field3 right(GridSpec::cube(2));
  EXPECT_THROW(wire::decode_payload(h, std::span(bytes).subspan(wire::kHeaderSize + 8), right), wire::WireError);
}

TEST(ChannelHub, MessagesArriveInOrder) {
  ChannelHub hub(2);
  auto a = hub.endpoint(0);
  auto b = hub.endpoint(1);
  const GridSpec g = GridSpec::cube(2);
  std::thread sender([&] {
    for (std::uint64_t t = 1; t <= 5; ++t) a->send(1, Message{t, t == 5, Field3(g, static_cast<double>(t))});
  });
  for (std::uint64_t t = 1; t <= 5; ++t) {
    const Message m = b->recv(0, t);
    EXPECT_EQ(m.tag, t);
    EXPECT_EQ(m.field(1, 1, 1), static_cast<double>(t));
    EXPECT_EQ(m.sender_finished, t == 5);
  }
  sender.join();
}

TEST(ChannelHub, TagMismatchThrows) {
  ChannelHub hub(2, 2000ms);
  auto a = hub.endpoint(0);
  auto b = hub.endpoint(1);
  std::thread sender([&] {
    try {
      a->send(1, Message{3, false, Field3(GridSpec::cube(2))});
    } catch (const TransportError&) {
    }
  });
  EXPECT_THROW(b->recv(0, 2), TransportError);
  sender.join();
}

TEST(ChannelHub, RecvTimesOut) {
  ChannelHub hub(2, 50ms);
  auto b = hub.endpoint(1);
  EXPECT_THROW(b->recv(0, 1), TransportError);
}

TEST(ChannelHub, AbortWakesBlockedReceivers) {
  ChannelHub hub(2);
  auto b = hub.endpoint(1);
  std::thread killer([&] {
    std::this_thread::sleep_for(20ms);
    hub.abort("test");
  });
  try {
    b->recv(0, 1);
    FAIL() << "recv returned";
  } catch (const TransportError& e) {
    EXPECT_NE(std::string(e.what()).find("test"), std::string::npos);
  }
  killer.join();
}

TEST(ChannelHub, RankRange) {
  ChannelHub hub(2);
  EXPECT_THROW(hub.endpoint(2), std::out_of_range);
  EXPECT_THROW(ChannelHub(0), std::invalid_argument);
}

TEST(SocketTransport, RoundTripAndTimeout) {
  int fds[2];
  ASSERT_EQ(::socketpair(AF_UNIX, SOCK_STREAM, 0, fds), 0);
  const GridSpec g(4, 3, 2);
  SocketTransport left(0, g, -1, fds[0], 200ms);
  SocketTransport right(1, g, fds[1], -1, 200ms);
  const Field3 f = oracle::random_field(g, 3);
  left.send(1, Message{7, true, f});
  const Message m = right.recv(0, 7);
  EXPECT_TRUE(m.field.interior_equals(f));
  EXPECT_TRUE(m.sender_finished);
  EXPECT_THROW(right.recv(0, 8), TransportError);
  EXPECT_THROW(left.recv(1, 1), TransportError);
  ::close(fds[0]);
  EXPECT_THROW(right.recv(0, 8), TransportError);
  ::close(fds[1]);
}
