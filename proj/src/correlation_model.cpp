#include "spdc/correlation_model.hpp"

#include <cmath>
#include <numeric>
#include <sstream>

#include "spdc/errors.hpp"
#include "spdc/units.hpp"

namespace spdc {

void FilterSpec::validate() const {
  if (!(gamma > 0.0)) throw DomainError("filter linewidth must be positive");
  if (!(peak_transmission >= 0.0 && peak_transmission <= 1.0))
    throw DomainError("filter peak transmission must lie in [0, 1]");
  if (mode_populations.empty()) throw DomainError("filter needs at least the target-mode population");
  double total = 0.0;
  for (double p : mode_populations) {
    if (!(p >= 0.0)) throw DomainError("mode populations must be non-negative");
    total += p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("mode populations must sum to 1");
  if (!(p0() > 0.0)) throw DomainError("target-mode population p0 must be positive");
}

void DetectorSpec::validate() const {
  if (!(efficiency >= 0.0 && efficiency <= 1.0)) throw DomainError("detector efficiency must lie in [0, 1]");
  if (!(dark_rate >= 0.0)) throw DomainError("dark rate must be non-negative");
  if (!(jitter_sigma >= 0.0)) throw DomainError("jitter must be non-negative");
  if (!(dead_time >= 0.0)) throw DomainError("dead time must be non-negative");
}

double SourceOperatingPoint::r_over_b() const { return brightness * pump_power_mw / kTwoPi; }

void SourceOperatingPoint::validate() const {
  if (!(brightness >= 0.0)) throw DomainError("brightness must be non-negative");
  if (!(pump_power_mw >= 0.0)) throw DomainError("pump power must be non-negative");
}

std::vector<std::string> model_warnings(const SourceOperatingPoint& op, const FilterSpec& filter_s,
                                        const FilterSpec& filter_i, std::optional<double> pm_bandwidth,
                                        double narrowband_ratio) {
  std::vector<std::string> out;
  if (op.r_over_b() >= 0.1) {
    std::ostringstream msg;
    msg << "R/B = " << op.r_over_b() << " is not small; the low-gain expressions assume R/B << 1";
    out.push_back(msg.str());
  }
  if (pm_bandwidth) {
    for (const FilterSpec* f : {&filter_s, &filter_i}) {
      if (f->gamma * narrowband_ratio > *pm_bandwidth) {
        std::ostringstream msg;
        msg << "filter linewidth " << hz_from_angular(f->gamma) << " Hz is within a factor " << narrowband_ratio
            << " of the SPDC bandwidth; the narrowband approximation is doubtful";
        out.push_back(msg.str());
      }
    }
  }
  return out;
}

Envelopes unfiltered_envelopes(double pair_rate, double bandwidth, double tau) {
  if (!(pair_rate > 0.0) || !(bandwidth > 0.0)) throw DomainError("pair rate and bandwidth must be positive");
  const double x = std::abs(tau) * bandwidth;
  Envelopes e;
  if (x <= 1.0) e.auto_envelope = pair_rate * (1.0 - x);
  if (x <= 0.5) e.cross_envelope = std::sqrt(pair_rate * bandwidth);
  return e;
}

double filtered_auto(const SourceOperatingPoint& op, const FilterSpec& filter, double tau) {
  return 0.25 * op.r_over_b() * filter.gamma * std::exp(-0.5 * filter.gamma * std::abs(tau));
}

double filtered_cross(const SourceOperatingPoint& op, const FilterSpec& filter_s, const FilterSpec& filter_i,
                      double tau) {
  const double gs = filter_s.gamma;
  const double gi = filter_i.gamma;
  const double amplitude = 0.5 * std::sqrt(op.r_over_b()) * gs * gi / (gs + gi);
  return amplitude * (tau < 0.0 ? std::exp(0.5 * gs * tau) : std::exp(-0.5 * gi * tau));
}

namespace {

double lumped_efficiency(const FilterSpec& f, const DetectorSpec& d) { return f.peak_transmission * d.efficiency; }

double effective_gamma(double gs, double gi) { return gs * gi / (gs + gi); }

}  // namespace

Fluxes fluxes(const SourceOperatingPoint& op, const FilterSpec& filter_s, const FilterSpec& filter_i,
              const DetectorSpec& det_s, const DetectorSpec& det_i) {
  const double rb = op.r_over_b();
  const double eta_s = lumped_efficiency(filter_s, det_s);
  const double eta_i = lumped_efficiency(filter_i, det_i);
  Fluxes w;
  w.signal = 0.25 * eta_s / filter_s.p0() * rb * filter_s.gamma + det_s.dark_rate;
  w.idler = 0.25 * eta_i * rb * filter_i.gamma + det_i.dark_rate;
  w.pair = 0.25 * eta_s * eta_i * rb * effective_gamma(filter_s.gamma, filter_i.gamma);
  return w;
}

double temporal_factor(double gamma_j, double gamma_k, double tau) {
  return tau < 0.0 ? std::exp(gamma_j * tau) : std::exp(-gamma_k * tau);
}

double erfcx(double x) {
  if (x < 25.0) return std::exp(x * x) * std::erfc(x);
  // Asymptotic series; the first omitted term is below 1e-13 relative here.
  const double inv2 = 1.0 / (2.0 * x * x);
  double term = 1.0;
  double sum = 1.0;
  for (int n = 1; n <= 5; ++n) {
    term *= -(2.0 * n - 1.0) * inv2;
    sum += term;
  }
  return sum / (x * std::sqrt(kPi));
}

namespace {

// exp(g (g s^2 / 2 + t)) erfc((g s^2 + t) / (sqrt2 s)), one branch of f~.
double jitter_branch(double gamma, double sigma, double t) {
  const double a = (gamma * sigma * sigma + t) / (std::sqrt(2.0) * sigma);
  if (a >= 0.0) return std::exp(-t * t / (2.0 * sigma * sigma)) * erfcx(a);
  return std::exp(gamma * (0.5 * gamma * sigma * sigma + t)) * std::erfc(a);
}

}  // namespace

double jitter_factor(double gamma_j, double gamma_k, double sigma, double tau) {
  if (sigma < 0.0) throw DomainError("jitter must be non-negative");
  if (sigma == 0.0) return temporal_factor(gamma_j, gamma_k, tau);
  return 0.5 * (jitter_branch(gamma_j, sigma, tau) + jitter_branch(gamma_k, sigma, -tau));
}

double combined_jitter(const DetectorSpec& a, const DetectorSpec& b) {
  return std::hypot(a.jitter_sigma, b.jitter_sigma);
}

double g2_cross(const SourceOperatingPoint& op, const FilterSpec& filter_s, const FilterSpec& filter_i,
                const DetectorSpec& det_s, const DetectorSpec& det_i, double tau) {
  const Fluxes w = fluxes(op, filter_s, filter_i, det_s, det_i);
  if (!(w.signal > 0.0) || !(w.idler > 0.0))
    throw DomainError("g2 is undefined when a channel has zero detection rate");
  const double geff = effective_gamma(filter_s.gamma, filter_i.gamma);
  const double eta_s = lumped_efficiency(filter_s, det_s);
  const double eta_i = lumped_efficiency(filter_i, det_i);
  const double shape = jitter_factor(filter_s.gamma, filter_i.gamma, combined_jitter(det_s, det_i), tau);
  return 1.0 + 0.25 * shape * eta_s * eta_i * op.r_over_b() * geff * geff / (w.signal * w.idler);
}

double g2_cross_bin_average(const SourceOperatingPoint& op, const FilterSpec& filter_s, const FilterSpec& filter_i,
                            const DetectorSpec& det_s, const DetectorSpec& det_i, double center, double width) {
  return bin_average([&](double t) { return g2_cross(op, filter_s, filter_i, det_s, det_i, t); },
                     center - 0.5 * width, center + 0.5 * width);
}

double g2_auto(double schmidt_k, double gamma, double sigma, double tau) {
  if (!(schmidt_k >= 1.0)) throw DomainError("Schmidt number must be at least 1");
  return 1.0 + jitter_factor(gamma, gamma, sigma, tau) / schmidt_k;
}

double g2_auto_bin_average(double schmidt_k, double gamma, double sigma, double center, double width) {
  return bin_average([&](double t) { return g2_auto(schmidt_k, gamma, sigma, t); }, center - 0.5 * width,
                     center + 0.5 * width);
}

double schmidt_number(std::span<const double> populations) {
  if (populations.empty()) throw DomainError("no mode populations");
  double total = 0.0;
  double squares = 0.0;
  for (double p : populations) {
    if (!(p >= 0.0)) throw DomainError("mode populations must be non-negative");
    total += p;
    squares += p * p;
  }
  if (std::abs(total - 1.0) > 1e-9) throw DomainError("mode populations must sum to 1");
  return 1.0 / squares;
}

double worst_case_p0(double schmidt_k) {
  if (!(schmidt_k >= 1.0)) throw DomainError("Schmidt number must be at least 1");
  if (schmidt_k > 2.0) throw DomainError("K > 2 cannot be reached with two modes");
  return 0.5 * (1.0 + std::sqrt(std::max(0.0, 2.0 / schmidt_k - 1.0)));
}

double cauchy_schwarz_ratio(double g2_si0, double g2_ss0, double g2_ii0) {
  if (g2_si0 < 0.0 || g2_ss0 < 0.0 || g2_ii0 < 0.0) throw DomainError("correlation values must be non-negative");
  const double denom = g2_ss0 * g2_ii0;
  if (denom == 0.0) throw DomainError("auto-correlation product is zero");
  return g2_si0 * g2_si0 / denom;
}

}  // namespace spdc
