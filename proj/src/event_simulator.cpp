#include "spdc/event_simulator.hpp"

#include <algorithm>
#include <boost/random/normal_distribution.hpp>
#include <cmath>
#include <complex>
#include <sstream>

#include "spdc/errors.hpp"
#include "spdc/keyvalue.hpp"
#include "spdc/units.hpp"

namespace spdc {

SimulationRng derive_rng(std::uint64_t master_seed, std::uint64_t channel, std::uint64_t shard,
                         std::uint64_t purpose) {
  std::seed_seq seq{static_cast<std::uint32_t>(master_seed), static_cast<std::uint32_t>(master_seed >> 32),
                    static_cast<std::uint32_t>(channel), static_cast<std::uint32_t>(shard),
                    static_cast<std::uint32_t>(shard >> 32), static_cast<std::uint32_t>(purpose)};
  return SimulationRng(seq);
}

namespace {

constexpr double kPsPerSecond = 1e12;

std::int64_t to_ps(double seconds) { return static_cast<std::int64_t>(std::llround(seconds * kPsPerSecond)); }

// Homogeneous Poisson process on [lo, hi) in ps, appended to `out`.
void poisson_times(double rate_per_s, double lo_ps, double hi_ps, SimulationRng& rng, std::vector<double>& out) {
  if (!(rate_per_s > 0.0) || !(hi_ps > lo_ps)) return;
  std::exponential_distribution<double> gap(rate_per_s / kPsPerSecond);
  for (double t = lo_ps + gap(rng); t < hi_ps; t += gap(rng)) out.push_back(t);
}

struct DetectWindow {
  std::int64_t gen_lo;  // dark counts are generated from here
  std::int64_t gen_hi;
  std::int64_t keep_lo;  // output keeps [keep_lo, keep_hi]
  std::int64_t keep_hi;
};

// Detector model on raw photon arrival times (ps, any order).
std::vector<std::uint64_t> detect(std::vector<std::int64_t> photons, const DetectorSpec& det, SimulationRng& rng,
                                  const DetectWindow& w) {
  if (det.efficiency < 1.0) {
    std::bernoulli_distribution keep(det.efficiency);
    std::erase_if(photons, [&](std::int64_t) { return !keep(rng); });
  }
  if (det.dark_rate > 0.0) {
    std::vector<double> darks;
    poisson_times(det.dark_rate, static_cast<double>(w.gen_lo), static_cast<double>(w.gen_hi), rng, darks);
    for (double t : darks) photons.push_back(std::llround(t));
  }
  if (det.jitter_sigma > 0.0) {
    std::normal_distribution<double> jitter(0.0, det.jitter_sigma * kPsPerSecond);
    for (auto& t : photons) t += std::llround(jitter(rng));
  }
  std::sort(photons.begin(), photons.end());
  std::vector<std::uint64_t> out;
  out.reserve(photons.size());
  const std::int64_t dead = to_ps(det.dead_time);
  bool have_last = false;
  std::int64_t last = 0;
  for (std::int64_t t : photons) {
    if (dead > 0 && have_last && t < last + dead) continue;
    have_last = true;
    last = t;
    if (t >= w.keep_lo && t <= w.keep_hi && t >= 0) out.push_back(static_cast<std::uint64_t>(t));
  }
  return out;
}

struct ShardPlan {
  std::int64_t count;
  std::int64_t duration_ps;
  std::int64_t shard_ps;
  std::int64_t guard_ps;

  std::int64_t begin(std::int64_t k) const { return k * shard_ps; }
  std::int64_t end(std::int64_t k) const { return k + 1 == count ? duration_ps : (k + 1) * shard_ps; }
};

ShardPlan plan_shards(double duration, double shard_duration, double guard) {
  ShardPlan p;
  p.duration_ps = to_ps(duration);
  p.shard_ps = std::max<std::int64_t>(1, to_ps(std::min(shard_duration, duration)));
  p.count = std::max<std::int64_t>(1, (p.duration_ps + p.shard_ps - 1) / p.shard_ps);
  p.guard_ps = to_ps(guard);
  return p;
}

template <class Shard>
std::vector<std::uint64_t> concatenate(const std::vector<Shard>& shards, std::vector<std::uint64_t> Shard::*field) {
  std::size_t total = 0;
  for (const auto& s : shards) total += (s.*field).size();
  std::vector<std::uint64_t> out;
  out.reserve(total);
  for (const auto& s : shards) out.insert(out.end(), (s.*field).begin(), (s.*field).end());
  return out;
}

DetectorSpec lumped(const DetectorSpec& det, const FilterSpec& filter) {
  DetectorSpec d = det;
  d.efficiency = det.efficiency * filter.peak_transmission;
  return d;
}

}  // namespace

void PairProcessConfig::validate() const {
  op.validate();
  filter_s.validate();
  filter_i.validate();
  det_s.validate();
  det_i.validate();
  if (!(duration > 0.0)) throw ConfigError("simulation duration must be positive");
  if (!(shard_duration > 0.0)) throw ConfigError("shard duration must be positive");
  if (!(pm_bandwidth > 0.0)) throw ConfigError("SPDC bandwidth must be positive");
  if (op.r_over_b() >= 0.1) throw ConfigError("pair oracle requires the low-gain regime R/B < 0.1");
  (void)passage_probabilities(filter_s, filter_i, pm_bandwidth);
}

PassageProbabilities passage_probabilities(const FilterSpec& filter_s, const FilterSpec& filter_i,
                                           double pm_bandwidth) {
  PassageProbabilities p;
  p.signal = filter_s.gamma / (4.0 * pm_bandwidth);
  p.idler = filter_i.gamma / (4.0 * pm_bandwidth);
  p.both = filter_s.gamma * filter_i.gamma / (4.0 * pm_bandwidth * (filter_s.gamma + filter_i.gamma));
  if (p.signal > 1.0 || p.idler > 1.0 || p.both > std::min(p.signal, p.idler) ||
      p.signal + p.idler - p.both > 1.0) {
    std::ostringstream msg;
    msg << "invalid joint filter-passage distribution (p_s=" << p.signal << ", p_i=" << p.idler
        << ", p_si=" << p.both << "); filters must be much narrower than the SPDC bandwidth";
    throw ConfigError(msg.str());
  }
  return p;
}

PairStreams simulate_pair_stream(const PairProcessConfig& config) {
  config.validate();
  const auto& fs = config.filter_s;
  const auto& fi = config.filter_i;
  const double pair_rate = config.op.r_over_b() * config.pm_bandwidth;
  const PassageProbabilities p = passage_probabilities(fs, fi, config.pm_bandwidth);
  const double rate_both = pair_rate * p.both;
  const double rate_s_only = pair_rate * (p.signal - p.both);
  const double rate_i_only = pair_rate * (p.idler - p.both);
  // Spurious etalon modes raise the signal flux by 1/p0 without adding pairs.
  const double rate_spurious = pair_rate * p.signal * (1.0 / fs.p0() - 1.0);
  const DetectorSpec det_s = lumped(config.det_s, fs);
  const DetectorSpec det_i = lumped(config.det_i, fi);

  const double guard = 10.0 * std::max({1.0 / std::min(fs.gamma, fi.gamma), config.det_s.jitter_sigma,
                                        config.det_i.jitter_sigma, config.det_s.dead_time, config.det_i.dead_time});
  const ShardPlan plan = plan_shards(config.duration, config.shard_duration, guard);

  struct Shard {
    std::vector<std::uint64_t> signal;
    std::vector<std::uint64_t> idler;
    std::vector<std::int64_t> delays;
  };
  std::vector<Shard> shards(static_cast<std::size_t>(plan.count));

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < plan.count; ++k) {
    const std::int64_t t0 = plan.begin(k);
    const std::int64_t t1 = plan.end(k);
    const double lo = static_cast<double>(t0 - plan.guard_ps);
    const double hi = static_cast<double>(t1);
    auto rng = derive_rng(config.seed, 2, static_cast<std::uint64_t>(k), 0);
    std::exponential_distribution<double> delay_s(fs.gamma / kPsPerSecond);
    std::exponential_distribution<double> delay_i(fi.gamma / kPsPerSecond);

    std::vector<double> emissions;
    std::vector<std::int64_t> raw_s;
    std::vector<std::int64_t> raw_i;
    Shard& out = shards[static_cast<std::size_t>(k)];

    poisson_times(rate_both, lo, hi, rng, emissions);
    for (double t : emissions) {
      const double ts = t + delay_s(rng);
      const double ti = t + delay_i(rng);
      raw_s.push_back(std::llround(ts));
      raw_i.push_back(std::llround(ti));
      if (config.record_pair_delays && t >= static_cast<double>(t0) && t < hi)
        out.delays.push_back(std::llround(ti) - std::llround(ts));
    }
    emissions.clear();
    poisson_times(rate_s_only + rate_spurious, lo, hi, rng, emissions);
    for (double t : emissions) raw_s.push_back(std::llround(t + delay_s(rng)));
    emissions.clear();
    poisson_times(rate_i_only, lo, hi, rng, emissions);
    for (double t : emissions) raw_i.push_back(std::llround(t + delay_i(rng)));

    const std::int64_t keep_hi = (k + 1 == plan.count) ? t1 : t1 - 1;
    const DetectWindow window{t0 - plan.guard_ps, t1, t0, keep_hi};
    auto rng_s = derive_rng(config.seed, 0, static_cast<std::uint64_t>(k), 1);
    auto rng_i = derive_rng(config.seed, 1, static_cast<std::uint64_t>(k), 1);
    out.signal = detect(std::move(raw_s), det_s, rng_s, window);
    out.idler = detect(std::move(raw_i), det_i, rng_i, window);
  }

  PairStreams result;
  result.created_pairs = pair_rate * config.duration;
  std::ostringstream tag;
  tag.precision(17);
  tag << "pair:" << config.op.brightness << ':' << config.op.pump_power_mw << ':' << fs.gamma << ':' << fi.gamma
      << ':' << fs.p0() << ':' << det_s.efficiency << ':' << det_i.efficiency << ':' << det_s.dark_rate << ':'
      << det_i.dark_rate << ':' << det_s.jitter_sigma << ':' << det_i.jitter_sigma << ':' << det_s.dead_time
      << ':' << det_i.dead_time << ':' << config.pm_bandwidth << ':' << config.duration << ':'
      << config.shard_duration;
  const std::string hash = fnv1a_hex(tag.str());
  for (auto [stream, channel] : {std::pair{&result.signal, 0u}, std::pair{&result.idler, 1u}}) {
    stream->channel = channel;
    stream->duration_ps = static_cast<std::uint64_t>(plan.duration_ps);
    stream->seed = config.seed;
    stream->config_hash = hash;
  }
  result.signal.timestamps = concatenate(shards, &Shard::signal);
  result.idler.timestamps = concatenate(shards, &Shard::idler);
  for (const auto& s : shards) result.pair_delays_ps.insert(result.pair_delays_ps.end(), s.delays.begin(), s.delays.end());
  result.signal.validate();
  result.idler.validate();
  return result;
}

void ThermalConfig::validate() const {
  det.validate();
  if (!(gamma > 0.0)) throw ConfigError("thermal linewidth must be positive");
  if (!(flux >= 0.0)) throw ConfigError("thermal flux must be non-negative");
  if (!(duration > 0.0) || !(shard_duration > 0.0)) throw ConfigError("durations must be positive");
  if (modes.empty()) throw ConfigError("thermal source needs at least one mode");
  double total = 0.0;
  for (const auto& m : modes) {
    if (!(m.population >= 0.0)) throw ConfigError("mode populations must be non-negative");
    total += m.population;
  }
  if (std::abs(total - 1.0) > 1e-9) throw ConfigError("mode populations must sum to 1");
  const double expected = (flux * det.efficiency + det.dark_rate) * duration;
  if (expected > max_events) {
    std::ostringstream msg;
    msg << "thermal simulation would produce ~" << expected << " events, above the memory bound " << max_events;
    throw ConfigError(msg.str());
  }
}

TimestampStream simulate_thermal_stream(const ThermalConfig& config) {
  config.validate();
  const double dt = 0.02 / config.gamma;  // s
  const double guard = 10.0 * std::max({1.0 / config.gamma, config.det.jitter_sigma, config.det.dead_time});
  const ShardPlan plan = plan_shards(config.duration, config.shard_duration, guard);
  const std::size_t n_modes = config.modes.size();

  std::vector<double> weight(n_modes);
  std::vector<double> omega(n_modes);
  for (std::size_t n = 0; n < n_modes; ++n) {
    weight[n] = std::sqrt(config.modes[n].population);
    omega[n] = kTwoPi * config.modes[n].detuning_hz;
  }
  const double decay = std::exp(-0.5 * config.gamma * dt);
  const double kick = std::sqrt(1.0 - decay * decay);

  std::vector<std::vector<std::uint64_t>> shards(static_cast<std::size_t>(plan.count));

#pragma omp parallel for schedule(dynamic)
  for (std::int64_t k = 0; k < plan.count; ++k) {
    using cd = std::complex<double>;
    const std::int64_t t0 = plan.begin(k);
    const std::int64_t t1 = plan.end(k);
    auto rng = derive_rng(config.seed, config.channel, static_cast<std::uint64_t>(k), 2);
    boost::random::normal_distribution<double> normal(0.0, std::sqrt(0.5));
    std::uniform_real_distribution<double> uniform(0.0, 1.0);

    std::vector<cd> amp(n_modes);
    for (auto& a : amp) a = cd(normal(rng), normal(rng));  // stationary start
    std::vector<cd> c(n_modes);
    std::vector<std::int64_t> photons;
    std::exponential_distribution<double> unit_exp(1.0);

    const double start_s = static_cast<double>(t0 - plan.guard_ps) / kPsPerSecond;
    const double end_s = static_cast<double>(t1) / kPsPerSecond;
    const auto steps = static_cast<std::int64_t>(std::ceil((end_s - start_s) / dt));

    // Beat phasors exp(i dw t) for each mode pair, advanced by one step at a
    // time, and the step integral of exp(i dw s) relative to the step start.
    struct Beat {
      std::size_t n, m;
      cd phasor, advance, step_integral;
    };
    std::vector<Beat> beats;
    for (std::size_t n = 0; n < n_modes; ++n)
      for (std::size_t m = n + 1; m < n_modes; ++m) {
        const double dw = omega[n] - omega[m];
        const cd step_integral = dw == 0.0 ? cd(dt, 0.0) : (std::polar(1.0, dw * dt) - 1.0) / cd(0.0, dw);
        beats.push_back({n, m, std::polar(1.0, dw * start_s), std::polar(1.0, dw * dt), step_integral});
      }

    // Arrivals of an inhomogeneous Poisson process: the integrated rate
    // crosses successive unit-exponential thresholds.
    double to_next = unit_exp(rng);
    for (std::int64_t step = 0; step < steps; ++step) {
      const double t = start_s + static_cast<double>(step) * dt;
      double integral = 0.0;
      for (std::size_t n = 0; n < n_modes; ++n) {
        c[n] = weight[n] * amp[n];
        integral += std::norm(c[n]) * dt;
      }
      for (auto& b : beats) {
        integral += 2.0 * std::real(c[b.n] * std::conj(c[b.m]) * b.phasor * b.step_integral);
        b.phasor *= b.advance;
      }
      if ((step & 0xfff) == 0)
        for (auto& b : beats) b.phasor /= std::abs(b.phasor);
      to_next -= config.flux * std::max(0.0, integral);
      int n_events = 0;
      while (to_next <= 0.0) {
        ++n_events;
        to_next += unit_exp(rng);
      }
      double bound = 0.0;
      if (n_events > 0)
        for (const auto& cn : c) bound += std::sqrt(std::norm(cn));
      const double ceiling = bound * bound;
      while (n_events > 0) {
        const double u = uniform(rng) * dt;
        cd field(0.0, 0.0);
        for (std::size_t n = 0; n < n_modes; ++n) field += c[n] * std::polar(1.0, omega[n] * (t + u));
        if (uniform(rng) * ceiling <= std::norm(field)) {
          photons.push_back(std::llround((t + u) * kPsPerSecond));
          --n_events;
        }
      }
      for (auto& a : amp) a = decay * a + kick * cd(normal(rng), normal(rng));
    }

    const std::int64_t keep_hi = (k + 1 == plan.count) ? t1 : t1 - 1;
    const DetectWindow window{t0 - plan.guard_ps, t1, t0, keep_hi};
    auto det_rng = derive_rng(config.seed, config.channel, static_cast<std::uint64_t>(k), 3);
    shards[static_cast<std::size_t>(k)] = detect(std::move(photons), config.det, det_rng, window);
  }

  TimestampStream out;
  out.channel = config.channel;
  out.duration_ps = static_cast<std::uint64_t>(plan.duration_ps);
  out.seed = config.seed;
  std::ostringstream tag;
  tag.precision(17);
  tag << "thermal:" << config.gamma << ':' << config.flux << ':' << config.duration << ':' << config.shard_duration;
  for (const auto& m : config.modes) tag << ':' << m.population << '@' << m.detuning_hz;
  tag << ':' << config.det.efficiency << ':' << config.det.dark_rate << ':' << config.det.jitter_sigma << ':'
      << config.det.dead_time;
  out.config_hash = fnv1a_hex(tag.str());
  std::size_t total = 0;
  for (const auto& s : shards) total += s.size();
  out.timestamps.reserve(total);
  for (const auto& s : shards) out.timestamps.insert(out.timestamps.end(), s.begin(), s.end());
  out.validate();
  return out;
}

TimestampStream apply_detector(const TimestampStream& stream, const DetectorSpec& det, std::uint64_t seed) {
  det.validate();
  stream.validate();
  auto rng = derive_rng(seed, stream.channel, 0, 4);
  std::vector<std::int64_t> photons(stream.timestamps.begin(), stream.timestamps.end());
  const auto end = static_cast<std::int64_t>(stream.duration_ps);
  TimestampStream out = stream;
  out.timestamps = detect(std::move(photons), det, rng, DetectWindow{0, end, 0, end});
  out.seed = seed;
  return out;
}

}  // namespace spdc
