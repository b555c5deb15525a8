#pragma once

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "spdc/correlation_model.hpp"
#include "spdc/correlator.hpp"
#include "spdc/estimation.hpp"
#include "spdc/units.hpp"

namespace spdc::testing {

/// Source and detection parameters of the PPKTP characterization.
struct SweepTruth {
  double brightness_per_s_mhz = 2.45e3;
  double eta_s = 0.031;
  double eta_i = 0.074;
};

inline CharacterizationFixed ppktp_fixed() {
  CharacterizationFixed f;
  f.gamma_s = angular_from_hz(600e6);
  f.gamma_i = angular_from_hz(240e6);
  f.dark_s = 150.0;
  f.dark_i = 3000.0;
  f.p0 = 0.71;
  f.sigma = 250e-12;
  return f;
}

inline std::vector<double> log_powers(double lo, double hi, int n) {
  std::vector<double> p;
  for (int k = 0; k < n; ++k) p.push_back(lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1)));
  return p;
}

/// Power sweep with counting statistics of `seconds` per point; the g2 point
/// is a peak-bin count of width `bin` over the accidental level. With
/// `rng == nullptr` the data are the exact model with the same error bars.
inline PowerSweepDataset synthetic_sweep(const SweepTruth& truth, const CharacterizationFixed& fixed,
                                         const std::vector<double>& powers, double seconds, std::mt19937_64* rng,
                                         double bin = 162e-12) {
  FilterSpec fs{fixed.gamma_s, 0.0, 1.0, {fixed.p0}};
  if (fixed.p0 < 1.0) fs.mode_populations.push_back(1.0 - fixed.p0);
  const FilterSpec fi{fixed.gamma_i, 0.0, 1.0, {1.0}};
  const DetectorSpec ds{truth.eta_s, fixed.dark_s, fixed.sigma, 0.0};
  const DetectorSpec di{truth.eta_i, fixed.dark_i, 0.0, 0.0};
  auto draw = [&](double mean) {
    if (!rng) return mean;
    std::poisson_distribution<long long> d(mean);
    return static_cast<double>(d(*rng));
  };
  PowerSweepDataset data;
  for (double p : powers) {
    const SourceOperatingPoint op{truth.brightness_per_s_mhz * 1e-6, p};
    const Fluxes w = fluxes(op, fs, fi, ds, di);
    const double g2 = g2_cross(op, fs, fi, ds, di, 0.0);
    const double ns = draw(w.signal * seconds);
    const double ni = draw(w.idler * seconds);
    const double n2 = draw(w.pair * seconds);
    const double accidental = w.signal * w.idler * seconds * bin;
    const double npk = draw(g2 * accidental);
    PowerSweepRow r;
    r.pump_power_mw = p;
    r.w_s = ns / seconds;
    r.w_s_err = std::sqrt(std::max(ns, 1.0)) / seconds;
    r.w_i = ni / seconds;
    r.w_i_err = std::sqrt(std::max(ni, 1.0)) / seconds;
    r.w_2 = n2 / seconds;
    r.w_2_err = std::sqrt(std::max(n2, 1.0)) / seconds;
    r.g2 = npk / accidental;
    r.g2_err = std::sqrt(std::max(npk, 1.0)) / accidental;
    data.rows.push_back(r);
  }
  return data;
}

/// Histogram whose bins hold Poisson counts around accidental * g2(bin).
inline CorrelationHistogram synthetic_histogram(const std::function<double(double center, double width)>& g2,
                                                std::int64_t bin_ps, std::int64_t range_ps, double rate_a,
                                                double rate_b, double seconds, std::mt19937_64& rng) {
  CorrelationHistogram h;
  h.bin_width_ps = bin_ps;
  h.range_ps = range_ps;
  h.duration_s = seconds;
  h.rate_a = rate_a;
  h.rate_b = rate_b;
  const double accidental = rate_a * rate_b * seconds * static_cast<double>(bin_ps) * 1e-12;
  h.counts.resize(static_cast<std::size_t>(2 * range_ps / bin_ps + 1));
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    std::poisson_distribution<long long> d(accidental * g2(static_cast<double>(h.tau_ps(k)) * 1e-12, bin_ps * 1e-12));
    h.counts[k] = static_cast<std::uint64_t>(d(rng));
  }
  return h;
}

}  // namespace spdc::testing
