#include <benchmark/benchmark.h>
#include <omp.h>

#include <random>

#include "spdc/correlator.hpp"
#include "spdc/event_simulator.hpp"

namespace {

spdc::TimestampStream poisson_stream(double rate, double duration, std::uint64_t seed, std::uint32_t channel) {
  auto rng = spdc::derive_rng(seed, channel, 0, 3);
  std::exponential_distribution<double> gap(rate);
  spdc::TimestampStream s;
  s.channel = channel;
  s.duration_ps = static_cast<std::uint64_t>(duration * 1e12);
  for (double t = gap(rng); t < duration; t += gap(rng)) s.timestamps.push_back(static_cast<std::uint64_t>(t * 1e12));
  return s;
}

const spdc::TimestampStream& stream_a() {
  static const auto s = poisson_stream(2e6, 1.0, 1, 0);
  return s;
}
const spdc::TimestampStream& stream_b() {
  static const auto s = poisson_stream(2e6, 1.0, 2, 1);
  return s;
}

constexpr std::int64_t kBin = 162;
constexpr std::int64_t kRange = 162 * 62;  // about +-10 ns

void BM_HistogramSerial(benchmark::State& state) {
  stream_a();
  stream_b();
  for (auto _ : state) benchmark::DoNotOptimize(spdc::coincidence_histogram_serial(stream_a(), stream_b(), kBin, kRange));
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(stream_a().timestamps.size() + stream_b().timestamps.size()));
}

void BM_HistogramParallel(benchmark::State& state) {
  omp_set_num_threads(static_cast<int>(state.range(0)));
  for (auto _ : state) benchmark::DoNotOptimize(spdc::coincidence_histogram(stream_a(), stream_b(), kBin, kRange));
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(stream_a().timestamps.size() + stream_b().timestamps.size()));
}

void BM_WindowedPairRate(benchmark::State& state) {
  for (auto _ : state) benchmark::DoNotOptimize(spdc::windowed_pair_rate(stream_a(), stream_b(), 6000, 0));
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(stream_a().timestamps.size() + stream_b().timestamps.size()));
}

}  // namespace

BENCHMARK(BM_HistogramSerial)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_HistogramParallel)->Arg(1)->Arg(2)->Arg(4)->UseRealTime()->Unit(benchmark::kMillisecond);
BENCHMARK(BM_WindowedPairRate)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
