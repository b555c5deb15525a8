#include "spdc/timestamp_stream.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "spdc/errors.hpp"

namespace spdc {

double TimestampStream::rate() const {
  if (duration_ps == 0) return 0.0;
  return static_cast<double>(timestamps.size()) / duration_s();
}

bool TimestampStream::is_sorted() const { return std::is_sorted(timestamps.begin(), timestamps.end()); }

void TimestampStream::validate() const {
  if (!is_sorted()) throw DomainError("timestamp stream on channel " + std::to_string(channel) + " is not sorted");
  if (!timestamps.empty() && timestamps.back() > duration_ps)
    throw DomainError("timestamp beyond stream duration on channel " + std::to_string(channel));
}

namespace {

void put_u32(std::vector<std::uint8_t>& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

void put_u64(std::vector<std::uint8_t>& out, std::uint64_t v) {
  for (int i = 0; i < 8; ++i) out.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
}

std::uint64_t get_le(std::span<const std::uint8_t> bytes, std::size_t offset, int width) {
  std::uint64_t v = 0;
  for (int i = 0; i < width; ++i) v |= static_cast<std::uint64_t>(bytes[offset + i]) << (8 * i);
  return v;
}

}  // namespace

std::vector<std::uint8_t> encode_ttag(const TimestampStream& stream) {
  std::vector<std::uint8_t> out;
  out.reserve(kTtagHeaderSize + 8 * stream.timestamps.size());
  for (char c : {'T', 'T', 'A', 'G'}) out.push_back(static_cast<std::uint8_t>(c));
  put_u32(out, kTtagVersion);
  put_u32(out, stream.channel);
  put_u64(out, stream.duration_ps);
  put_u64(out, stream.timestamps.size());
  for (std::uint64_t t : stream.timestamps) put_u64(out, t);
  return out;
}

TimestampStream decode_ttag(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < kTtagHeaderSize) throw IoError("TTAG data shorter than its header");
  if (!std::equal(bytes.begin(), bytes.begin() + 4, "TTAG")) throw IoError("missing TTAG magic bytes");
  const auto version = static_cast<std::uint32_t>(get_le(bytes, 4, 4));
  if (version != kTtagVersion) throw IoError("unsupported TTAG version " + std::to_string(version));
  TimestampStream s;
  s.channel = static_cast<std::uint32_t>(get_le(bytes, 8, 4));
  s.duration_ps = get_le(bytes, 12, 8);
  const std::uint64_t count = get_le(bytes, 20, 8);
  if ((bytes.size() - kTtagHeaderSize) / 8 != count || (bytes.size() - kTtagHeaderSize) % 8 != 0)
    throw IoError("TTAG payload size does not match the declared count");
  s.timestamps.resize(count);
  for (std::uint64_t i = 0; i < count; ++i) s.timestamps[i] = get_le(bytes, kTtagHeaderSize + 8 * i, 8);
  return s;
}

void write_ttag(const TimestampStream& stream, const std::string& path) {
  const auto bytes = encode_ttag(stream);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path + "'");
  out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("write failed for '" + path + "'");
}

TimestampStream read_ttag(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path + "'");
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return decode_ttag(bytes);
  } catch (const IoError& e) {
    throw IoError(path + ": " + e.what());
  }
}

}  // namespace spdc
