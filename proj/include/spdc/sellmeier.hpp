#pragma once

#include <string>
#include <vector>

namespace spdc {

enum class Material { kKtpZ, kLiNbO3E };

std::string to_string(Material m);
Material material_from_string(const std::string& name);

struct Interval {
  double lo = 0.0;
  double hi = 0.0;
  bool contains(double x) const { return x >= lo && x <= hi; }
};

/// Published Sellmeier expansion loaded from a coefficient file.
///
/// Two functional forms are supported: `kato-ktp` (two-pole dispersion plus
/// a thermo-optic polynomial) and `jundt-ln` (temperature-dependent
/// coefficients through f = (T - t0)(T + t1)). See the files in
/// data/sellmeier for the exact expressions.
struct SellmeierModel {
  Material material = Material::kKtpZ;
  std::string form;
  std::vector<double> coefficients;
  std::vector<double> thermo_coefficients;  // empty: no thermo-optic data
  double thermo_scale = 1.0;
  double reference_temperature_c = 20.0;
  Interval validity_um;
  Interval temperature_validity_c;
  std::string citation;
  std::string version;

  /// False when the coefficient set carries no temperature dependence; the
  /// index is then evaluated at the reference temperature.
  bool temperature_corrected() const;

  static SellmeierModel load(const std::string& path);
  static SellmeierModel parse(const std::string& text);
  /// Coefficient files shipped in data/sellmeier.
  static SellmeierModel bundled(Material m);
};

/// n(lambda, T). Throws DomainError naming the valid interval when the
/// wavelength lies outside the model's validity range.
double refractive_index(const SellmeierModel& model, double wavelength_um, double temperature_c);

}  // namespace spdc
