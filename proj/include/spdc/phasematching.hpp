#pragma once

#include <functional>
#include <span>
#include <vector>

#include "spdc/sellmeier.hpp"

namespace spdc {

/// Argument at which sinc^2(x) drops to one half.
inline constexpr double kSincHalfMaxArgument = 1.39156;

/// Periodically poled waveguide, described by its bulk material (waveguide
/// dispersion is neglected).
struct WaveguideSpec {
  SellmeierModel model;
  double poling_period_um = 0.0;
  double length_mm = 0.0;
  double temperature_c = 20.0;

  void validate() const;
};

/// Energy conservation: lambda_i = 1 / (1/lambda_p - 1/lambda_s).
double idler_wavelength_nm(double pump_nm, double signal_nm);

/// Delta k = 2 pi (n_p/l_p - n_s/l_s - n_i/l_i - 1/Lambda), in rad/mm.
double phase_mismatch(const WaveguideSpec& spec, double pump_nm, double signal_nm);

/// First-order frequency slope Delta k' = dDk/dlambda * (-lambda^2 / c), in
/// rad/(mm GHz). The derivative is taken by centered differences starting at
/// 0.1 nm and halving until successive estimates agree to 1e-5 relative.
/// Only the signal and idler terms depend on the signal wavelength, so the
/// result is independent of the poling period.
double dispersion_slope(const WaveguideSpec& spec, double pump_nm, double signal_nm);

/// FWHM of sinc^2(Delta k' nu L / 2): 4 x_half / (|Delta k'| L), in GHz.
double fwhm_bandwidth_ghz(double slope_per_mm_ghz, double length_mm);

/// sinc^2(Delta k L / 2) at the given signal-frequency detunings (GHz) from
/// `signal_center_nm`, with the pump fixed. Peak value 1 where Delta k = 0.
std::vector<double> spdc_spectrum(const WaveguideSpec& spec, double pump_nm, double signal_center_nm,
                                  std::span<const double> detunings_ghz);

/// sinc^2 of an explicit mismatch (rad/mm) and length (mm).
double phasematching_intensity(double delta_k_per_mm, double length_mm);

/// Poling period (um) that zeroes Delta k at the spec's temperature.
double phasematching_period_um(const WaveguideSpec& spec, double pump_nm, double signal_nm);

/// Bisection for a zero of `mismatch` (rad/mm) on [lo, hi] down to
/// |mismatch| < 1e-6 rad/mm. Throws NumericalError without a sign change.
double solve_temperature(const std::function<double(double)>& mismatch, double lo_c, double hi_c);

/// Temperature at which the waveguide phase-matches; the search interval
/// defaults to the Sellmeier model's temperature validity.
double solve_phasematching_temperature(const WaveguideSpec& spec, double pump_nm, double signal_nm);

}  // namespace spdc
