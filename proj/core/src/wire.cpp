#include "parastencil/wire.hpp"

#include <bit>
#include <cstring>

namespace parastencil::wire {

void put_u32(std::byte* dst, std::uint32_t v) {
  for (int b = 0; b < 4; ++b) dst[b] = static_cast<std::byte>((v >> (8 * b)) & 0xffu);
}

void put_u64(std::byte* dst, std::uint64_t v) {
  for (int b = 0; b < 8; ++b) dst[b] = static_cast<std::byte>((v >> (8 * b)) & 0xffu);
}

void put_f64(std::byte* dst, double v) { put_u64(dst, std::bit_cast<std::uint64_t>(v)); }

std::uint32_t get_u32(const std::byte* src) {
  std::uint32_t v = 0;
  for (int b = 0; b < 4; ++b) v |= static_cast<std::uint32_t>(src[b]) << (8 * b);
  return v;
}

std::uint64_t get_u64(const std::byte* src) {
  std::uint64_t v = 0;
  for (int b = 0; b < 8; ++b) v |= static_cast<std::uint64_t>(src[b]) << (8 * b);
  return v;
}

double get_f64(const std::byte* src) { return std::bit_cast<double>(get_u64(src)); }

std::array<std::byte, kHeaderSize> encode_header(const Header& h) {
  std::array<std::byte, kHeaderSize> out{};
  std::memcpy(out.data(), kMagic.data(), kMagic.size());
  put_u32(out.data() + 8, h.nx);
  put_u32(out.data() + 12, h.ny);
  put_u32(out.data() + 16, h.nz);
  put_u32(out.data() + 20, h.flags);
  put_u64(out.data() + 24, h.tag);
  return out;
}

Header decode_header(std::span<const std::byte> bytes) {
  if (bytes.size() < kHeaderSize) throw WireError("truncated message header");
  if (std::memcmp(bytes.data(), kMagic.data(), kMagic.size()) != 0)
    throw WireError("bad magic in message header");
  Header h;
  h.nx = get_u32(bytes.data() + 8);
  h.ny = get_u32(bytes.data() + 12);
  h.nz = get_u32(bytes.data() + 16);
  h.flags = get_u32(bytes.data() + 20);
  h.tag = get_u64(bytes.data() + 24);
  return h;
}

std::vector<std::byte> encode_field(const Field3& f, std::uint64_t tag, std::uint32_t flags) {
  const GridSpec& g = f.spec();
  const Header h{static_cast<std::uint32_t>(g.nx()), static_cast<std::uint32_t>(g.ny()),
                 static_cast<std::uint32_t>(g.nz()), flags, tag};
  std::vector<std::byte> out(kHeaderSize + h.payload_bytes());
  const auto head = encode_header(h);
  std::memcpy(out.data(), head.data(), head.size());
  std::byte* dst = out.data() + kHeaderSize;
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ny(); ++j) {
      const double* row = f.data() + g.index(0, j, k);
      for (int i = 0; i < g.nx(); ++i, dst += sizeof(double)) put_f64(dst, row[i]);
    }
  return out;
}

void decode_payload(const Header& h, std::span<const std::byte> payload, Field3& out) {
  const GridSpec& g = out.spec();
  if (h.nx != static_cast<std::uint32_t>(g.nx()) || h.ny != static_cast<std::uint32_t>(g.ny()) ||
      h.nz != static_cast<std::uint32_t>(g.nz()))
    throw WireError("message extents do not match receiving grid " + to_string(g));
  if (payload.size() != h.payload_bytes()) throw WireError("payload size does not match header");
  const std::byte* src = payload.data();
  for (int k = 0; k < g.nz(); ++k)
    for (int j = 0; j < g.ny(); ++j) {
      double* row = out.data() + g.index(0, j, k);
      for (int i = 0; i < g.nx(); ++i, src += sizeof(double)) row[i] = get_f64(src);
    }
}

}  // namespace parastencil::wire
