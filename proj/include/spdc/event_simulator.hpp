#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "spdc/correlation_model.hpp"
#include "spdc/timestamp_stream.hpp"

namespace spdc {

// Two separate Monte Carlo oracles. The pair process reproduces singles,
// pair flux and the cross-correlation peak (g2_si far above 2) but, being a
// classical point process of independent pairs, shows no auto-correlation
// bunching. The thermal field reproduces auto-correlation bunching and the
// multimode FSR beating but carries no signal-idler pairs. No single
// classical simulation can do both.

/// Random engine used by the simulators. Substreams are derived from the
/// master seed and a (channel, shard, purpose) tag.
using SimulationRng = std::mt19937_64;
SimulationRng derive_rng(std::uint64_t master_seed, std::uint64_t channel, std::uint64_t shard,
                         std::uint64_t purpose);

struct PairProcessConfig {
  SourceOperatingPoint op;
  FilterSpec filter_s;
  FilterSpec filter_i;
  DetectorSpec det_s;
  DetectorSpec det_i;
  /// SPDC bandwidth B (rad/s); sets per-pair filter passage probabilities.
  double pm_bandwidth = 0.0;
  std::uint64_t seed = 1;
  double duration = 1.0;  // s
  /// Length of independently simulated time shards (s). Part of the
  /// configuration so results do not depend on the thread count.
  double shard_duration = 1.0;
  /// Keep t_i - t_s for pairs where both photons were detected (diagnostic).
  bool record_pair_delays = false;

  void validate() const;
};

struct PairStreams {
  TimestampStream signal;  // channel 0
  TimestampStream idler;   // channel 1
  /// Expected number of created pairs, R * duration.
  double created_pairs = 0.0;
  std::vector<std::int64_t> pair_delays_ps;
};

/// Filter-passage probabilities of one created pair.
struct PassageProbabilities {
  double signal = 0.0;
  double idler = 0.0;
  double both = 0.0;
};
PassageProbabilities passage_probabilities(const FilterSpec& filter_s, const FilterSpec& filter_i,
                                           double pm_bandwidth);

/// Poisson pair creation at rate R, joint filter passage, exponential
/// filter delays with rate Gamma_j, spurious-mode signal background, then
/// the detector model on each channel.
PairStreams simulate_pair_stream(const PairProcessConfig& config);

struct ThermalMode {
  double population = 1.0;
  double detuning_hz = 0.0;
};

struct ThermalConfig {
  double gamma = 0.0;  // angular FWHM of each mode, rad/s
  double flux = 0.0;   // mean photon rate before detection, 1/s
  std::vector<ThermalMode> modes{ThermalMode{}};
  DetectorSpec det;
  std::uint64_t seed = 1;
  double duration = 1e-3;
  double shard_duration = 1e-3;
  std::uint32_t channel = 0;
  /// Upper bound on expected events, guarding memory.
  double max_events = 5e8;

  void validate() const;
};

/// Multimode chaotic light: each mode is a stationary complex
/// Ornstein-Uhlenbeck amplitude with decay Gamma/2, weighted by sqrt(p_n) and
/// shifted by its detuning. Detections follow a Poisson process modulated by
/// the instantaneous intensity (mean rate `flux`), then the detector model.
///
/// The field is advanced with exact OU steps of Gamma dt = 0.02. Inside a
/// step the amplitudes are held and the detuning phases are integrated
/// exactly, so the FSR beat does not constrain the step.
TimestampStream simulate_thermal_stream(const ThermalConfig& config);

/// Independent thinning with the efficiency, Poisson dark counts over the
/// stream duration, Gaussian jitter, re-sorting, and non-paralyzable dead
/// time. Events jittered outside [0, duration] are dropped.
TimestampStream apply_detector(const TimestampStream& stream, const DetectorSpec& det, std::uint64_t seed);

}  // namespace spdc
