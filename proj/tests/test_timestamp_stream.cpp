#include <filesystem>

#include "doctest.h"
#include "spdc/errors.hpp"
#include "spdc/timestamp_stream.hpp"

using namespace spdc;

TEST_CASE("TTAG encoding round-trips bit-exactly") {
  TimestampStream s;
  s.channel = 7;
  s.duration_ps = 1'000'000'000'000ULL;
  s.timestamps = {0, 1, 5, 5, 123456789012ULL, s.duration_ps};
  const auto bytes = encode_ttag(s);
  CHECK(bytes.size() == 28 + 8 * s.timestamps.size());
  CHECK(std::string(bytes.begin(), bytes.begin() + 4) == "TTAG");
  const TimestampStream back = decode_ttag(bytes);
  CHECK(back.channel == 7);
  CHECK(back.duration_ps == s.duration_ps);
  CHECK(back.timestamps == s.timestamps);
  CHECK(encode_ttag(back) == bytes);
}

TEST_CASE("TTAG header fields are little-endian") {
  TimestampStream s;
  s.channel = 0x01020304;
  s.duration_ps = 0x1122334455667788ULL;
  s.timestamps = {0x0A0B0C0D0E0F1011ULL};
  s.duration_ps = std::max<std::uint64_t>(s.duration_ps, s.timestamps[0]);
  const auto b = encode_ttag(s);
  CHECK(b[4] == 1);  // version
  CHECK(b[8] == 0x04);
  CHECK(b[11] == 0x01);
  CHECK(b[20] == 1);  // count
  CHECK(b[28] == 0x11);
  CHECK(b[35] == 0x0A);
}

TEST_CASE("corrupt TTAG data is an IO error") {
  TimestampStream s;
  s.duration_ps = 10;
  s.timestamps = {1, 2, 3};
  auto bytes = encode_ttag(s);
  auto truncated = bytes;
  truncated.pop_back();
  CHECK_THROWS_AS(decode_ttag(truncated), IoError);
  auto bad_magic = bytes;
  bad_magic[0] = 'X';
  CHECK_THROWS_AS(decode_ttag(bad_magic), IoError);
  auto bad_version = bytes;
  bad_version[4] = 9;
  CHECK_THROWS_AS(decode_ttag(bad_version), IoError);
  CHECK_THROWS_AS(read_ttag("/nonexistent/path.ttag"), IoError);
}

TEST_CASE("stream files round-trip") {
  TimestampStream s;
  s.channel = 1;
  s.duration_ps = 1000;
  s.timestamps = {3, 400, 999};
  const auto path = (std::filesystem::temp_directory_path() / "spdc_roundtrip.ttag").string();
  write_ttag(s, path);
  const auto back = read_ttag(path);
  CHECK(back.timestamps == s.timestamps);
  CHECK(back.duration_ps == 1000);
  std::filesystem::remove(path);
}

TEST_CASE("stream invariants") {
  TimestampStream s;
  s.duration_ps = 100;
  s.timestamps = {5, 3};
  CHECK_FALSE(s.is_sorted());
  CHECK_THROWS_AS(s.validate(), DomainError);
  s.timestamps = {3, 101};
  CHECK_THROWS_AS(s.validate(), DomainError);
  s.timestamps = {3, 3, 100};
  CHECK_NOTHROW(s.validate());
  CHECK(s.rate() == doctest::Approx(3.0 / 100e-12));
}
