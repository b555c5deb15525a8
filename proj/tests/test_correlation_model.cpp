#include <cmath>
#include <functional>
#include <vector>

#include "doctest.h"
#include "spdc/correlation_model.hpp"
#include "spdc/errors.hpp"
#include "spdc/units.hpp"

using namespace spdc;

namespace {

const double kGammaS = angular_from_hz(600e6);
const double kGammaI = angular_from_hz(240e6);

struct Setup {
  SourceOperatingPoint op{2.45e3 * 1e-6, 1.0};
  FilterSpec fs{kGammaS, 50e9, 1.0, {0.71, 0.29}};
  FilterSpec fi{kGammaI, 60e9, 1.0, {1.0}};
  DetectorSpec ds{0.031, 150.0, 250e-12, 0.0};
  DetectorSpec di{0.074, 3000.0, 0.0, 0.0};
};

double trapezoid(const std::function<double(double)>& f, double a, double b, int n) {
  const double h = (b - a) / n;
  double s = 0.5 * (f(a) + f(b));
  for (int k = 1; k < n; ++k) s += f(a + k * h);
  return s * h;
}

}  // namespace

TEST_CASE("unfiltered envelopes") {
  const double r = 1e6, b = 1e12;
  auto e = unfiltered_envelopes(r, b, 0.0);
  CHECK(e.auto_envelope == doctest::Approx(r));
  CHECK(e.cross_envelope == doctest::Approx(std::sqrt(r * b)));
  e = unfiltered_envelopes(r, b, 2.0 / b);
  CHECK(e.auto_envelope == 0.0);
  CHECK(e.cross_envelope == 0.0);
  e = unfiltered_envelopes(r, b, 0.4 / b);
  CHECK(e.auto_envelope == doctest::Approx(0.6 * r));
  CHECK(e.cross_envelope == doctest::Approx(std::sqrt(r * b)));
  CHECK_THROWS_AS(unfiltered_envelopes(0.0, b, 0.0), DomainError);
}

TEST_CASE("filtered auto envelope") {
  Setup s;
  const double rb = s.op.r_over_b();
  const double w = 0.25 * rb * kGammaS;
  CHECK(filtered_auto(s.op, s.fs, 0.0) == doctest::Approx(w).epsilon(1e-14));
  CHECK(filtered_auto(s.op, s.fs, 2.0 / kGammaS) == doctest::Approx(w * std::exp(-1.0)).epsilon(1e-14));
  const double integral =
      trapezoid([&](double t) { return filtered_auto(s.op, s.fs, t); }, -60.0 / kGammaS, 60.0 / kGammaS, 400000);
  CHECK(integral == doctest::Approx(w * 4.0 / kGammaS).epsilon(1e-6));
}

TEST_CASE("filtered cross envelope") {
  Setup s;
  CHECK(filtered_cross(s.op, s.fs, s.fi, -1e-18) == doctest::Approx(filtered_cross(s.op, s.fs, s.fi, 0.0)).epsilon(1e-8));
  const double rb = s.op.r_over_b();
  const double w2 = 0.25 * rb * kGammaS * kGammaI / (kGammaS + kGammaI);
  const double span = 80.0 / kGammaI;
  const double integral = trapezoid(
      [&](double t) { return std::pow(filtered_cross(s.op, s.fs, s.fi, t), 2); }, -span, span, 800000);
  CHECK(integral == doctest::Approx(w2).epsilon(1e-6));
  FilterSpec same = s.fs;
  for (double t : {1e-10, 5e-10, 2e-9}) {
    CHECK(filtered_cross(s.op, same, same, t) == doctest::Approx(filtered_cross(s.op, same, same, -t)).epsilon(1e-14));
    CHECK(filtered_cross(s.op, same, same, t) / filtered_cross(s.op, same, same, 0.0) ==
          doctest::Approx(std::exp(-kGammaS * t / 2.0)).epsilon(1e-12));
  }
}

TEST_CASE("fluxes at the characterization operating point") {
  Setup s;
  const Fluxes w = fluxes(s.op, s.fs, s.fi, s.ds, s.di);
  CHECK(w.signal == doctest::Approx(16195.7746479).epsilon(1e-10));
  CHECK(w.idler == doctest::Approx(13878.0).epsilon(1e-10));
  CHECK(w.pair == doctest::Approx(240.87).epsilon(1e-10));

  s.op.pump_power_mw = 0.0;
  const Fluxes dark = fluxes(s.op, s.fs, s.fi, s.ds, s.di);
  CHECK(dark.signal == 150.0);
  CHECK(dark.idler == 3000.0);
  CHECK(dark.pair == 0.0);

  Setup blocked;
  blocked.di.efficiency = 0.0;
  const Fluxes b = fluxes(blocked.op, blocked.fs, blocked.fi, blocked.ds, blocked.di);
  CHECK(b.pair == 0.0);
  CHECK(b.idler == 3000.0);
}

TEST_CASE("pair flux is the signal flux rescaled by the joint passage") {
  Setup s;
  s.ds.dark_rate = 0.0;
  s.fs.mode_populations = {1.0};
  const Fluxes w = fluxes(s.op, s.fs, s.fi, s.ds, s.di);
  CHECK(w.pair == doctest::Approx(w.signal * s.di.efficiency * kGammaI / (kGammaS + kGammaI)).epsilon(1e-9));
}

TEST_CASE("jitter factor") {
  CHECK(jitter_factor(kGammaS, kGammaI, 250e-12, 0.0) == doctest::Approx(0.648784236276).epsilon(1e-10));
  CHECK(std::abs(jitter_factor(kGammaS, kGammaI, 250e-12, 0.0) - 0.65) < 0.005);
  CHECK(jitter_factor(kGammaI, kGammaI, 125e-12, 0.0) == doctest::Approx(0.865732371695).epsilon(1e-10));
  CHECK(jitter_factor(kGammaS, kGammaS, 125e-12, 0.0) == doctest::Approx(0.712329433851).epsilon(1e-10));
  for (double t : {-3e-9, -1e-10, 0.0, 1e-10, 2e-9}) {
    CHECK(std::abs(jitter_factor(kGammaS, kGammaI, 0.0, t) - temporal_factor(kGammaS, kGammaI, t)) < 1e-9);
    CHECK(std::abs(jitter_factor(kGammaS, kGammaI, 1e-18, t) - temporal_factor(kGammaS, kGammaI, t)) < 1e-8);
    CHECK(jitter_factor(kGammaS, kGammaI, 250e-12, t) ==
          doctest::Approx(jitter_factor(kGammaI, kGammaS, 250e-12, -t)).epsilon(1e-12));
  }
}

TEST_CASE("jitter factor stays finite for very large Gamma sigma") {
  for (double sigma : {1e-9, 1e-8, 1e-6}) {
    for (double t : {-5e-8, 0.0, 3e-9}) {
      const double v = jitter_factor(kGammaS, kGammaI, sigma, t);
      CHECK(std::isfinite(v));
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("jitter factor equals a numerical Gaussian convolution") {
  const double sigma = 250e-12;
  const double span = 10.0 * sigma + 10.0 / std::min(kGammaS, kGammaI);
  for (int k = -20; k <= 20; ++k) {
    const double t = span * k / 20.0;
    // Integrate the kernel around each side of the kink separately.
    auto integrand = [&](double u) {
      return temporal_factor(kGammaS, kGammaI, t - u) * std::exp(-u * u / (2.0 * sigma * sigma)) /
             (std::sqrt(kTwoPi) * sigma);
    };
    const double lo = -12.0 * sigma, hi = 12.0 * sigma;
    double conv = 0.0;
    if (t > lo && t < hi)
      conv = bin_average(integrand, lo, t, 64) * (t - lo) + bin_average(integrand, t, hi, 64) * (hi - t);
    else
      conv = bin_average(integrand, lo, hi, 128) * (hi - lo);
    CHECK(std::abs(conv - jitter_factor(kGammaS, kGammaI, sigma, t)) < 1e-5);
  }
}

TEST_CASE("cross-correlation at the operating points") {
  Setup s;
  s.op.pump_power_mw = 0.05;
  const double g = g2_cross(s.op, s.fs, s.fi, s.ds, s.di, 0.0);
  CHECK(g == doctest::Approx(2494.82501012).epsilon(1e-9));
  CHECK(std::abs(g / 2600.0 - 1.0) < 0.15);
  s.op.pump_power_mw = 1.0;
  CHECK(g2_cross(s.op, s.fs, s.fi, s.ds, s.di, 0.0) == doctest::Approx(749.889027972).epsilon(1e-9));
  CHECK(std::abs(g2_cross(s.op, s.fs, s.fi, s.ds, s.di, 50.0 / kGammaI) - 1.0) < 1e-3);
  CHECK(std::abs(g2_cross(s.op, s.fs, s.fi, s.ds, s.di, -50.0 / kGammaS) - 1.0) < 1e-3);
}

TEST_CASE("ideal cross-correlation reduces to the closed form") {
  Setup s;
  s.ds = DetectorSpec{0.3, 0.0, 0.0, 0.0};
  s.di = DetectorSpec{0.2, 0.0, 0.0, 0.0};
  s.fs.mode_populations = {1.0};
  const double rb = s.op.r_over_b();
  const double expected = 1.0 + 4.0 / rb * kGammaS * kGammaI / std::pow(kGammaS + kGammaI, 2);
  CHECK(g2_cross(s.op, s.fs, s.fi, s.ds, s.di, 0.0) == doctest::Approx(expected).epsilon(1e-12));
}

TEST_CASE("cross-correlation needs detection in both channels") {
  Setup s;
  s.op.pump_power_mw = 0.0;
  s.ds.dark_rate = 0.0;
  CHECK_THROWS_AS(g2_cross(s.op, s.fs, s.fi, s.ds, s.di, 0.0), DomainError);
}

TEST_CASE("cross-correlation is at least one and falls with pump power") {
  Setup s;
  s.ds.dark_rate = s.di.dark_rate = 0.0;
  double previous = INFINITY;
  for (double p = 0.01; p < 5.0; p *= 1.5) {
    s.op.pump_power_mw = p;
    const double g = g2_cross(s.op, s.fs, s.fi, s.ds, s.di, 0.0);
    CHECK(g < previous);
    previous = g;
    for (double t = -5e-9; t <= 5e-9; t += 2.5e-10) CHECK(g2_cross(s.op, s.fs, s.fi, s.ds, s.di, t) >= 1.0);
  }
}

TEST_CASE("bin average of the cross-correlation") {
  Setup s;
  const double w = 162e-12;
  const double avg = g2_cross_bin_average(s.op, s.fs, s.fi, s.ds, s.di, 0.0, w);
  const double ref =
      trapezoid([&](double t) { return g2_cross(s.op, s.fs, s.fi, s.ds, s.di, t); }, -w / 2, w / 2, 20000) / w;
  CHECK(avg == doctest::Approx(ref).epsilon(1e-7));
}

TEST_CASE("auto-correlation") {
  CHECK(g2_auto(1.0, kGammaI, 0.0, 0.0) == doctest::Approx(2.0));
  CHECK(g2_auto(1.1, kGammaI, 0.0, 0.0) == doctest::Approx(1.90909090909).epsilon(1e-10));
  CHECK(std::abs(g2_auto(1.1, kGammaI, 0.0, 0.0) - 1.909) < 1e-3);
  CHECK(g2_auto(1.0, kGammaI, 125e-12, 1e-6) == doctest::Approx(1.0));
  for (double k : {1.0, 1.1, 1.71}) {
    for (double t = -5e-9; t <= 5e-9; t += 1e-10) {
      const double g = g2_auto(k, kGammaS, 125e-12, t);
      CHECK(g >= 1.0);
      CHECK(g <= 1.0 + 1.0 / k + 1e-15);
    }
  }
  CHECK_THROWS_AS(g2_auto(0.9, kGammaI, 0.0, 0.0), DomainError);
  CHECK(g2_auto_bin_average(1.0, kGammaI, 0.0, 0.0, 1e-15) == doctest::Approx(2.0).epsilon(1e-6));
}

TEST_CASE("Schmidt number and worst-case target population") {
  const std::vector<double> p{0.95, 0.025, 0.025};
  CHECK(schmidt_number(p) == doctest::Approx(1.10650069156).epsilon(1e-10));
  CHECK(std::abs(schmidt_number(p) - 1.1) < 0.01);
  for (int n : {1, 2, 5, 17}) {
    const std::vector<double> uniform(static_cast<std::size_t>(n), 1.0 / n);
    CHECK(schmidt_number(uniform) == doctest::Approx(n).epsilon(1e-14));
  }
  CHECK(worst_case_p0(1.71) == doctest::Approx(0.705906922707).epsilon(1e-10));
  CHECK(std::abs(worst_case_p0(1.71) - 0.71) < 0.01);
  CHECK(worst_case_p0(1.0) == doctest::Approx(1.0));
  CHECK(worst_case_p0(2.0) == doctest::Approx(0.5));
  CHECK_THROWS_AS(worst_case_p0(2.5), DomainError);
  CHECK_THROWS_AS(schmidt_number(std::vector<double>{0.5, 0.2}), DomainError);
}

TEST_CASE("Cauchy-Schwarz ratio") {
  CHECK(cauchy_schwarz_ratio(2600.0, 2.0, 2.0) == doctest::Approx(1.69e6));
  CHECK(cauchy_schwarz_ratio(1.0, 1.0, 1.0) == 1.0);
  CHECK(cauchy_schwarz_ratio(2.0, 2.0, 2.0) == 1.0);
  CHECK_THROWS_AS(cauchy_schwarz_ratio(2.0, 0.0, 2.0), DomainError);
}

TEST_CASE("model warnings") {
  Setup s;
  CHECK(model_warnings(s.op, s.fs, s.fi, kTwoPi * 539e9).empty());
  SourceOperatingPoint hot = s.op;
  hot.pump_power_mw = 1000.0;
  CHECK(model_warnings(hot, s.fs, s.fi).size() == 1);
  CHECK(model_warnings(s.op, s.fs, s.fi, kTwoPi * 40e9).size() == 1);
}

TEST_CASE("spec validation") {
  CHECK_THROWS_AS((FilterSpec{0.0, 0.0, 1.0, {1.0}}).validate(), DomainError);
  CHECK_THROWS_AS((FilterSpec{1.0, 0.0, 1.0, {0.9}}).validate(), DomainError);
  CHECK_THROWS_AS((FilterSpec{1.0, 0.0, 1.0, {1.1, -0.1}}).validate(), DomainError);
  CHECK_THROWS_AS((DetectorSpec{1.5, 0.0, 0.0, 0.0}).validate(), DomainError);
  CHECK_THROWS_AS((DetectorSpec{0.5, -1.0, 0.0, 0.0}).validate(), DomainError);
  CHECK_THROWS_AS((DetectorSpec{0.5, 0.0, -1e-12, 0.0}).validate(), DomainError);
  CHECK(combined_jitter(DetectorSpec{1, 0, 3e-12, 0}, DetectorSpec{1, 0, 4e-12, 0}) == doctest::Approx(5e-12));
}
