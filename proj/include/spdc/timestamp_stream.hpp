#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace spdc {

/// Detection times of one channel in integer picoseconds since 0.
struct TimestampStream {
  std::uint32_t channel = 0;
  std::uint64_t duration_ps = 0;
  std::vector<std::uint64_t> timestamps;
  // Provenance; not part of the TTAG file.
  std::uint64_t seed = 0;
  std::string config_hash;

  double duration_s() const { return static_cast<double>(duration_ps) * 1e-12; }
  double rate() const;
  bool is_sorted() const;
  /// Throws DomainError unless sorted and within [0, duration].
  void validate() const;
};

inline constexpr std::uint32_t kTtagVersion = 1;
inline constexpr std::size_t kTtagHeaderSize = 28;

/// TTAG layout, all little-endian: "TTAG", u32 version, u32 channel,
/// u64 duration_ps, u64 count, then count x u64 timestamps.
std::vector<std::uint8_t> encode_ttag(const TimestampStream& stream);
TimestampStream decode_ttag(std::span<const std::uint8_t> bytes);

void write_ttag(const TimestampStream& stream, const std::string& path);
TimestampStream read_ttag(const std::string& path);

}  // namespace spdc
