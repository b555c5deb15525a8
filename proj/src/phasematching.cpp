#include "spdc/phasematching.hpp"

#include <cmath>
#include <sstream>

#include "spdc/errors.hpp"
#include "spdc/units.hpp"

namespace spdc {

void WaveguideSpec::validate() const {
  if (!(poling_period_um > 0.0)) throw DomainError("poling period must be positive");
  if (!(length_mm > 0.0)) throw DomainError("waveguide length must be positive");
}

double idler_wavelength_nm(double pump_nm, double signal_nm) {
  if (!(pump_nm > 0.0) || !(signal_nm > pump_nm)) {
    std::ostringstream msg;
    msg << "no physical idler for pump " << pump_nm << " nm and signal " << signal_nm
        << " nm (signal must be longer than pump)";
    throw DomainError(msg.str());
  }
  return 1.0 / (1.0 / pump_nm - 1.0 / signal_nm);
}

namespace {

// 2 pi (n_s/l_s + n_i/l_i) in rad/mm: the signal-dependent part of Delta k.
double signal_idler_wavevector(const WaveguideSpec& spec, double pump_nm, double signal_nm) {
  const double idler_nm = idler_wavelength_nm(pump_nm, signal_nm);
  const double ns = refractive_index(spec.model, signal_nm * 1e-3, spec.temperature_c);
  const double ni = refractive_index(spec.model, idler_nm * 1e-3, spec.temperature_c);
  return kTwoPi * (ns / signal_nm + ni / idler_nm) * 1e6;
}

double pump_wavevector(const WaveguideSpec& spec, double pump_nm) {
  const double np = refractive_index(spec.model, pump_nm * 1e-3, spec.temperature_c);
  return kTwoPi * np / pump_nm * 1e6;
}

}  // namespace

double phase_mismatch(const WaveguideSpec& spec, double pump_nm, double signal_nm) {
  spec.validate();
  const double grating = kTwoPi / (spec.poling_period_um * 1e-3);
  return pump_wavevector(spec, pump_nm) - signal_idler_wavevector(spec, pump_nm, signal_nm) - grating;
}

double dispersion_slope(const WaveguideSpec& spec, double pump_nm, double signal_nm) {
  spec.validate();
  auto derivative = [&](double h) {
    return -(signal_idler_wavevector(spec, pump_nm, signal_nm + h) -
             signal_idler_wavevector(spec, pump_nm, signal_nm - h)) /
           (2.0 * h);
  };
  double h = 0.1;
  double previous = derivative(h);
  double current = previous;
  for (int i = 0; i < 30; ++i) {
    h *= 0.5;
    current = derivative(h);
    if (std::abs(current - previous) <= 1e-5 * std::abs(current)) break;
    previous = current;
  }
  // dlambda/dnu = -lambda^2/c, in nm/GHz.
  const double dlambda_dnu = -(signal_nm * signal_nm) / (kSpeedOfLight * 1e9) * 1e9;
  return current * dlambda_dnu;
}

double fwhm_bandwidth_ghz(double slope_per_mm_ghz, double length_mm) {
  if (slope_per_mm_ghz == 0.0) throw DomainError("dispersion slope is zero; bandwidth is unbounded");
  if (!(length_mm > 0.0)) throw DomainError("length must be positive");
  return 4.0 * kSincHalfMaxArgument / (std::abs(slope_per_mm_ghz) * length_mm);
}

double phasematching_intensity(double delta_k_per_mm, double length_mm) {
  const double x = 0.5 * delta_k_per_mm * length_mm;
  if (x == 0.0) return 1.0;
  const double s = std::sin(x) / x;
  return s * s;
}

std::vector<double> spdc_spectrum(const WaveguideSpec& spec, double pump_nm, double signal_center_nm,
                                  std::span<const double> detunings_ghz) {
  const double c_nm_ghz = kSpeedOfLight;  // nm * GHz = 1e-9 m * 1e9 /s
  const double center_ghz = c_nm_ghz / signal_center_nm;
  std::vector<double> out;
  out.reserve(detunings_ghz.size());
  for (double d : detunings_ghz) {
    const double signal_nm = c_nm_ghz / (center_ghz + d);
    out.push_back(phasematching_intensity(phase_mismatch(spec, pump_nm, signal_nm), spec.length_mm));
  }
  return out;
}

double phasematching_period_um(const WaveguideSpec& spec, double pump_nm, double signal_nm) {
  const double residual = pump_wavevector(spec, pump_nm) - signal_idler_wavevector(spec, pump_nm, signal_nm);
  if (!(residual > 0.0)) throw DomainError("no quasi-phase-matching period: wavevector residual is not positive");
  return kTwoPi / residual * 1e3;
}

double solve_temperature(const std::function<double(double)>& mismatch, double lo_c, double hi_c) {
  double f_lo = mismatch(lo_c);
  double f_hi = mismatch(hi_c);
  if (f_lo == 0.0) return lo_c;
  if (f_hi == 0.0) return hi_c;
  if ((f_lo > 0.0) == (f_hi > 0.0)) {
    std::ostringstream msg;
    msg << "no phase-matching temperature in [" << lo_c << ", " << hi_c << "] C: mismatch is " << f_lo << " and "
        << f_hi << " rad/mm at the ends";
    throw NumericalError(msg.str());
  }
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo_c + hi_c);
    const double f_mid = mismatch(mid);
    if (std::abs(f_mid) < 1e-6 || hi_c - lo_c < 1e-12) return mid;
    if ((f_mid > 0.0) == (f_lo > 0.0)) {
      lo_c = mid;
      f_lo = f_mid;
    } else {
      hi_c = mid;
    }
  }
  throw NumericalError("temperature bisection did not converge");
}

double solve_phasematching_temperature(const WaveguideSpec& spec, double pump_nm, double signal_nm) {
  auto mismatch = [&](double t) {
    WaveguideSpec at = spec;
    at.temperature_c = t;
    return phase_mismatch(at, pump_nm, signal_nm);
  };
  return solve_temperature(mismatch, spec.model.temperature_validity_c.lo, spec.model.temperature_validity_c.hi);
}

}  // namespace spdc
