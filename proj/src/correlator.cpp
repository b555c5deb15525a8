#include "spdc/correlator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <omp.h>

#include "spdc/errors.hpp"

namespace spdc {

std::uint64_t CorrelationHistogram::total() const {
  return std::accumulate(counts.begin(), counts.end(), std::uint64_t{0});
}

namespace {

void check_inputs(const TimestampStream& a, const TimestampStream& b, std::int64_t bin_width_ps,
                  std::int64_t range_ps) {
  if (bin_width_ps <= 0) throw DomainError("bin width must be positive");
  if (range_ps < 0 || range_ps % bin_width_ps != 0)
    throw DomainError("histogram range must be a non-negative multiple of the bin width");
  if (!a.is_sorted() || !b.is_sorted()) throw DomainError("coincidence histogram requires sorted streams");
  if (a.duration_ps != b.duration_ps) throw DomainError("streams cover different durations");
}

std::int64_t floor_div(std::int64_t num, std::int64_t den) {
  std::int64_t q = num / den;
  if ((num % den != 0) && ((num < 0) != (den < 0))) --q;
  return q;
}

CorrelationHistogram empty_histogram(const TimestampStream& a, const TimestampStream& b, std::int64_t bin_width_ps,
                                     std::int64_t range_ps) {
  CorrelationHistogram h;
  h.bin_width_ps = bin_width_ps;
  h.range_ps = range_ps;
  h.counts.assign(static_cast<std::size_t>(2 * (range_ps / bin_width_ps) + 1), 0);
  h.duration_s = a.duration_s();
  h.rate_a = a.rate();
  h.rate_b = b.rate();
  h.auto_correlation = (&a == &b);
  h.config_hash = a.config_hash;
  return h;
}

// Accumulates pairs owned by a-events [first, last) into `counts`.
void sweep(const std::vector<std::uint64_t>& ta, const std::vector<std::uint64_t>& tb, std::size_t first,
           std::size_t last, bool skip_self, std::int64_t width, std::int64_t range, std::uint64_t* counts) {
  if (first >= last || tb.empty()) return;
  const std::int64_t half_bins = range / width;
  // Delays in [-(range + w/2), range + w/2); compare doubled values to keep
  // half-picosecond edges exact.
  const std::int64_t lo_edge2 = -(2 * range + width);
  const std::int64_t hi_edge2 = 2 * range + width;
  const auto lower_time = [&](std::uint64_t t) {
    const std::int64_t lo = static_cast<std::int64_t>(t) - (range + width / 2 + 1);
    return lo < 0 ? std::uint64_t{0} : static_cast<std::uint64_t>(lo);
  };
  std::size_t j0 = static_cast<std::size_t>(std::lower_bound(tb.begin(), tb.end(), lower_time(ta[first])) - tb.begin());
  for (std::size_t i = first; i < last; ++i) {
    const auto t = static_cast<std::int64_t>(ta[i]);
    while (j0 < tb.size() && 2 * (static_cast<std::int64_t>(tb[j0]) - t) < lo_edge2) ++j0;
    for (std::size_t j = j0; j < tb.size(); ++j) {
      const std::int64_t tau2 = 2 * (static_cast<std::int64_t>(tb[j]) - t);
      if (tau2 >= hi_edge2) break;
      if (skip_self && j == i) continue;
      const std::int64_t bin = floor_div(tau2 + width, 2 * width);
      counts[bin + half_bins] += 1;
    }
  }
}

}  // namespace

CorrelationHistogram coincidence_histogram_serial(const TimestampStream& a, const TimestampStream& b,
                                                  std::int64_t bin_width_ps, std::int64_t range_ps) {
  check_inputs(a, b, bin_width_ps, range_ps);
  CorrelationHistogram h = empty_histogram(a, b, bin_width_ps, range_ps);
  sweep(a.timestamps, b.timestamps, 0, a.timestamps.size(), h.auto_correlation, bin_width_ps, range_ps,
        h.counts.data());
  return h;
}

CorrelationHistogram coincidence_histogram(const TimestampStream& a, const TimestampStream& b,
                                           std::int64_t bin_width_ps, std::int64_t range_ps) {
  check_inputs(a, b, bin_width_ps, range_ps);
  CorrelationHistogram h = empty_histogram(a, b, bin_width_ps, range_ps);
  const std::size_t n = a.timestamps.size();
  const std::size_t bins = h.counts.size();
  const int threads = omp_get_max_threads();
  const std::size_t shards = std::max<std::size_t>(1, std::min<std::size_t>(n / 4096 + 1, 8 * static_cast<std::size_t>(threads)));
  if (shards == 1) {
    sweep(a.timestamps, b.timestamps, 0, n, h.auto_correlation, bin_width_ps, range_ps, h.counts.data());
    return h;
  }
  std::vector<std::uint64_t> partial(shards * bins, 0);
#pragma omp parallel for schedule(dynamic)
  for (std::size_t s = 0; s < shards; ++s) {
    const std::size_t first = n * s / shards;
    const std::size_t last = n * (s + 1) / shards;
    sweep(a.timestamps, b.timestamps, first, last, h.auto_correlation, bin_width_ps, range_ps,
          partial.data() + s * bins);
  }
  for (std::size_t s = 0; s < shards; ++s)
    for (std::size_t k = 0; k < bins; ++k) h.counts[k] += partial[s * bins + k];
  return h;
}

std::vector<G2Point> g2_estimate(const CorrelationHistogram& h) {
  if (!(h.duration_s > 0.0)) throw DomainError("g2 normalization needs a positive duration");
  if (!(h.rate_a > 0.0) || !(h.rate_b > 0.0)) throw DomainError("g2 normalization needs non-zero singles rates");
  const double norm = h.rate_a * h.rate_b * h.duration_s * static_cast<double>(h.bin_width_ps) * 1e-12;
  std::vector<G2Point> out(h.counts.size());
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    const double c = static_cast<double>(h.counts[k]);
    out[k] = {static_cast<double>(h.tau_ps(k)), c / norm, std::sqrt(c) / norm};
  }
  return out;
}

PairRate windowed_pair_rate(const TimestampStream& a, const TimestampStream& b, std::int64_t window_ps,
                            std::int64_t offset_ps) {
  if (window_ps <= 0) throw DomainError("coincidence window must be positive");
  if (!a.is_sorted() || !b.is_sorted()) throw DomainError("pair rate requires sorted streams");
  if (a.duration_ps != b.duration_ps) throw DomainError("streams cover different durations");
  const double duration = a.duration_s();
  if (!(duration > 0.0)) throw DomainError("pair rate needs a positive duration");
  const auto& ta = a.timestamps;
  const auto& tb = b.timestamps;
  const bool skip_self = (&a == &b);
  // Doubled delays: |2 (t_b - t_a - offset)| <= window.
  std::uint64_t count = 0;
  std::size_t j0 = 0;
  for (std::size_t i = 0; i < ta.size(); ++i) {
    const std::int64_t center = static_cast<std::int64_t>(ta[i]) + offset_ps;
    while (j0 < tb.size() && 2 * (static_cast<std::int64_t>(tb[j0]) - center) < -window_ps) ++j0;
    for (std::size_t j = j0; j < tb.size(); ++j) {
      if (2 * (static_cast<std::int64_t>(tb[j]) - center) > window_ps) break;
      if (skip_self && j == i) continue;
      ++count;
    }
  }
  PairRate r;
  r.coincidences = count;
  r.raw = static_cast<double>(count) / duration;
  r.subtracted = r.raw - a.rate() * b.rate() * static_cast<double>(window_ps) * 1e-12;
  r.error = std::sqrt(static_cast<double>(count)) / duration;
  return r;
}

}  // namespace spdc
