#pragma once

#include <cstdint>
#include <vector>

#include "spdc/timestamp_stream.hpp"

namespace spdc {

/// Coincidence counts versus delay tau = t_b - t_a (channel a = signal,
/// b = idler by convention).
///
/// Bin n covers [n w - w/2, n w + w/2) for n in [-range/w, range/w]; a delay
/// that falls exactly on an edge goes to the upper bin. Because of that tie
/// rule the mirror identity hist(a,b)[n] == hist(b,a)[-n] is bin-exact only
/// when no delay lands on an edge, e.g. for odd bin widths.
struct CorrelationHistogram {
  std::int64_t bin_width_ps = 0;
  std::int64_t range_ps = 0;
  std::vector<std::uint64_t> counts;
  double duration_s = 0.0;
  double rate_a = 0.0;
  double rate_b = 0.0;
  bool auto_correlation = false;
  std::string config_hash;

  std::size_t zero_index() const { return static_cast<std::size_t>(range_ps / bin_width_ps); }
  std::int64_t tau_ps(std::size_t index) const {
    return (static_cast<std::int64_t>(index) - static_cast<std::int64_t>(zero_index())) * bin_width_ps;
  }
  std::uint64_t total() const;
};

/// Histogram of all ordered pairs within +-range, via one forward sweep over
/// both sorted streams. Passing the same stream object twice computes an
/// auto-correlation and skips each event's pairing with itself.
/// The a-events are split into shards processed in parallel; the shard that
/// owns t_a counts the pair.
CorrelationHistogram coincidence_histogram(const TimestampStream& a, const TimestampStream& b,
                                           std::int64_t bin_width_ps, std::int64_t range_ps);

/// Single-threaded reference for coincidence_histogram.
CorrelationHistogram coincidence_histogram_serial(const TimestampStream& a, const TimestampStream& b,
                                                  std::int64_t bin_width_ps, std::int64_t range_ps);

struct G2Point {
  double tau_ps = 0.0;
  double g2 = 0.0;
  double error = 0.0;
};

/// counts / (r_a r_b T w) per bin with Poisson errors.
std::vector<G2Point> g2_estimate(const CorrelationHistogram& h);

struct PairRate {
  double raw = 0.0;         // coincidences per second
  double subtracted = 0.0;  // raw minus r_a r_b window
  double error = 0.0;
  std::uint64_t coincidences = 0;
};

/// Coincidences with t_b - t_a - offset in [-window/2, +window/2].
PairRate windowed_pair_rate(const TimestampStream& a, const TimestampStream& b, std::int64_t window_ps,
                            std::int64_t offset_ps);

}  // namespace spdc
