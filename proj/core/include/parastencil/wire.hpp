#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "parastencil/grid.hpp"

namespace parastencil::wire {

// Field message layout, all integers and doubles little-endian:
//
//   offset  size  content
//        0     8  magic, the ASCII bytes "PARAREAL"
//        8     4  nx (u32)
//       12     4  ny (u32)
//       16     4  nz (u32)
//       20     4  flags (u32); bit 0 = sender will send no further messages
//       24     8  tag (u64)
//       32  8*n   interior values (f64), x fastest, then y, then z
inline constexpr std::size_t kHeaderSize = 32;
inline constexpr std::array<unsigned char, 8> kMagic{'P', 'A', 'R', 'A', 'R', 'E', 'A', 'L'};
inline constexpr std::uint32_t kFlagFinished = 1u;

class WireError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Header {
  std::uint32_t nx = 0;
  std::uint32_t ny = 0;
  std::uint32_t nz = 0;
  std::uint32_t flags = 0;
  std::uint64_t tag = 0;

  std::size_t payload_bytes() const { return static_cast<std::size_t>(nx) * ny * nz * sizeof(double); }
};

std::array<std::byte, kHeaderSize> encode_header(const Header& h);
/// Throws WireError on a bad magic.
Header decode_header(std::span<const std::byte> bytes);

/// Header followed by the field's interior.
std::vector<std::byte> encode_field(const Field3& f, std::uint64_t tag, std::uint32_t flags = 0);

/// Writes the payload into the interior of out; the header's extents must
/// match out's grid.
void decode_payload(const Header& h, std::span<const std::byte> payload, Field3& out);

void put_u32(std::byte* dst, std::uint32_t v);
void put_u64(std::byte* dst, std::uint64_t v);
void put_f64(std::byte* dst, double v);
std::uint32_t get_u32(const std::byte* src);
std::uint64_t get_u64(const std::byte* src);
double get_f64(const std::byte* src);

}  // namespace parastencil::wire
