#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

namespace spdc {

/// Lorentzian filter (Fabry-Perot line). `gamma` is the angular FWHM in
/// rad/s; use angular_from_hz() on the quoted Gamma/(2 pi).
struct FilterSpec {
  double gamma = 0.0;
  double fsr_hz = 0.0;
  double peak_transmission = 1.0;
  /// Populations of the filter's longitudinal modes; index 0 is the target
  /// mode. Entries sum to one.
  std::vector<double> mode_populations{1.0};

  double p0() const { return mode_populations.front(); }
  void validate() const;
};

/// Detection chain. `efficiency` is the lumped collection-and-detection
/// efficiency; `jitter_sigma` is the Gaussian timing width of this channel
/// alone.
struct DetectorSpec {
  double efficiency = 1.0;
  double dark_rate = 0.0;
  double jitter_sigma = 0.0;
  double dead_time = 0.0;

  void validate() const;
};

/// Source brightness and pump power. `brightness` is the conventional
/// 2 pi R/B at 1 mW, in pairs / (s Hz).
struct SourceOperatingPoint {
  double brightness = 0.0;
  double pump_power_mw = 0.0;

  /// Dimensionless R/B pairing with angular linewidths.
  double r_over_b() const;
  void validate() const;
};

/// Low-gain and narrowband-filter warnings; empty when the model applies.
/// `pm_bandwidth` is the SPDC bandwidth B in rad/s (skipped when absent).
std::vector<std::string> model_warnings(const SourceOperatingPoint& op, const FilterSpec& filter_s,
                                        const FilterSpec& filter_i, std::optional<double> pm_bandwidth = {},
                                        double narrowband_ratio = 100.0);

struct Envelopes {
  double auto_envelope = 0.0;
  double cross_envelope = 0.0;
};

/// Unfiltered low-gain envelopes: triangular auto, rectangular cross.
Envelopes unfiltered_envelopes(double pair_rate, double bandwidth, double tau);

/// (1/4)(R/B) Gamma exp(-Gamma |tau| / 2), in 1/s.
double filtered_auto(const SourceOperatingPoint& op, const FilterSpec& filter, double tau);

/// Filtered cross envelope for tau = t_i - t_s. Its square is proportional
/// to temporal_factor(Gamma_s, Gamma_i, tau).
double filtered_cross(const SourceOperatingPoint& op, const FilterSpec& filter_s, const FilterSpec& filter_i,
                      double tau);

struct Fluxes {
  double signal = 0.0;  // W_s, 1/s
  double idler = 0.0;   // W_i, 1/s
  double pair = 0.0;    // W_2, 1/s
};

/// Detected singles and pair fluxes including efficiencies, the signal
/// spurious-mode factor 1/p0 and dark counts. The lumped efficiency of a
/// channel is filter peak transmission times detector efficiency.
Fluxes fluxes(const SourceOperatingPoint& op, const FilterSpec& filter_s, const FilterSpec& filter_i,
              const DetectorSpec& det_s, const DetectorSpec& det_i);

/// Jitter-free two-sided exponential: exp(Gamma_j tau) for tau < 0 and
/// exp(-Gamma_k tau) for tau >= 0.
double temporal_factor(double gamma_j, double gamma_k, double tau);

/// temporal_factor convolved with a centered Gaussian of width sigma.
/// Evaluated through the scaled complementary error function so that large
/// Gamma sigma does not overflow.
double jitter_factor(double gamma_j, double gamma_k, double sigma, double tau);

/// exp(x^2) erfc(x).
double erfcx(double x);

/// Timing width seen by a signal-idler coincidence: sqrt(sigma_s^2 + sigma_i^2).
double combined_jitter(const DetectorSpec& a, const DetectorSpec& b);

/// Normalized cross-correlation with dark counts, efficiencies and jitter.
double g2_cross(const SourceOperatingPoint& op, const FilterSpec& filter_s, const FilterSpec& filter_i,
                const DetectorSpec& det_s, const DetectorSpec& det_i, double tau);

/// g2_cross averaged over [center - width/2, center + width/2].
double g2_cross_bin_average(const SourceOperatingPoint& op, const FilterSpec& filter_s, const FilterSpec& filter_i,
                            const DetectorSpec& det_s, const DetectorSpec& det_i, double center, double width);

/// 1 + f~_jj(tau) / K.
double g2_auto(double schmidt_k, double gamma, double sigma, double tau);

/// g2_auto averaged over a bin.
double g2_auto_bin_average(double schmidt_k, double gamma, double sigma, double center, double width);

/// K = 1 / sum p_n^2.
double schmidt_number(std::span<const double> populations);

/// Target-mode population p0 >= 1/2 for K spread over exactly two modes.
double worst_case_p0(double schmidt_k);

/// g2_si(0)^2 / (g2_ss(0) g2_ii(0)); above one signals nonclassical light.
double cauchy_schwarz_ratio(double g2_si0, double g2_ss0, double g2_ii0);

/// Mean of f over [a, b] by composite 8-point Gauss-Legendre.
template <class F>
double bin_average(F&& f, double a, double b, int panels = 8);

}  // namespace spdc

#include "spdc/detail/quadrature.hpp"
