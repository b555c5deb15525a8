#include "spdc/sellmeier.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "spdc/errors.hpp"
#include "spdc/keyvalue.hpp"

namespace spdc {

std::string to_string(Material m) {
  switch (m) {
    case Material::kKtpZ: return "KTP_z";
    case Material::kLiNbO3E: return "LiNbO3_e";
  }
  return "?";
}

Material material_from_string(const std::string& name) {
  if (name == "KTP_z") return Material::kKtpZ;
  if (name == "LiNbO3_e") return Material::kLiNbO3E;
  throw ConfigError("unknown material '" + name + "' (expected KTP_z or LiNbO3_e)");
}

bool SellmeierModel::temperature_corrected() const {
  return form == "jundt-ln" || !thermo_coefficients.empty();
}

namespace {

Interval read_interval(const KeyValueDocument& doc, const std::string& key, Dimension dim, double unit) {
  auto values = doc.get_list("", key, dim);
  if (values.size() != 2 || !(values[0] < values[1]))
    throw ConfigError(key + ": expected two increasing bounds", doc.entry("", key).line);
  return {values[0] / unit, values[1] / unit};
}

void check_form(const SellmeierModel& m) {
  if (m.form == "kato-ktp") {
    if (m.coefficients.size() != 5) throw ConfigError("kato-ktp needs 5 coefficients");
    if (!m.thermo_coefficients.empty() && m.thermo_coefficients.size() != 4)
      throw ConfigError("kato-ktp thermo_coefficients needs 4 entries");
  } else if (m.form == "jundt-ln") {
    if (m.coefficients.size() != 12) throw ConfigError("jundt-ln needs 12 coefficients");
  } else {
    throw ConfigError("unknown Sellmeier form '" + m.form + "'");
  }
}

}  // namespace

SellmeierModel SellmeierModel::parse(const std::string& text) {
  auto doc = KeyValueDocument::parse(text);
  SellmeierModel m;
  m.material = material_from_string(doc.get_string("", "material"));
  m.form = doc.get_string("", "form");
  m.coefficients = doc.get_list("", "coefficients", Dimension::kDimensionless);
  if (doc.has("", "thermo_coefficients"))
    m.thermo_coefficients = doc.get_list("", "thermo_coefficients", Dimension::kDimensionless);
  m.thermo_scale = doc.get_quantity_or("", "thermo_scale", Dimension::kDimensionless, 1.0);
  m.reference_temperature_c = doc.get_quantity("", "reference_temperature", Dimension::kTemperature);
  m.validity_um = read_interval(doc, "validity", Dimension::kLength, 1e-6);
  m.temperature_validity_c = read_interval(doc, "temperature_validity", Dimension::kTemperature, 1.0);
  m.citation = doc.get_string("", "citation");
  m.version = doc.get_string("", "version");
  doc.reject_unused({""});
  check_form(m);
  return m;
}

SellmeierModel SellmeierModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open Sellmeier file '" + path + "'");
  std::stringstream buffer;
  buffer << in.rdbuf();
  try {
    return parse(buffer.str());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what(), e.line());
  }
}

SellmeierModel SellmeierModel::bundled(Material m) {
  const std::string dir = std::string(SPDC_DATA_DIR) + "/sellmeier/";
  switch (m) {
    case Material::kKtpZ: return load(dir + "ktp_z_kato2002.txt");
    case Material::kLiNbO3E: return load(dir + "linbo3_e_jundt1997.txt");
  }
  throw ConfigError("no bundled Sellmeier data");
}

double refractive_index(const SellmeierModel& model, double wavelength_um, double temperature_c) {
  if (!model.validity_um.contains(wavelength_um)) {
    std::ostringstream msg;
    msg << to_string(model.material) << ": wavelength " << wavelength_um << " um outside Sellmeier validity ["
        << model.validity_um.lo << ", " << model.validity_um.hi << "] um";
    throw DomainError(msg.str());
  }
  const double l = wavelength_um;
  const double l2 = l * l;
  const auto& c = model.coefficients;
  if (model.form == "kato-ktp") {
    const double n = std::sqrt(c[0] + c[1] / (l2 - c[2]) + c[3] / (l2 - c[4]));
    if (model.thermo_coefficients.empty()) return n;
    const auto& t = model.thermo_coefficients;
    const double dndt = (t[0] / (l2 * l) + t[1] / l2 + t[2] / l + t[3]) * model.thermo_scale;
    return n + dndt * (temperature_c - model.reference_temperature_c);
  }
  // jundt-ln
  const double f = (temperature_c - c[10]) * (temperature_c + c[11]);
  const double pole = c[2] + c[8] * f;
  const double n2 = c[0] + c[6] * f + (c[1] + c[7] * f) / (l2 - pole * pole) + (c[3] + c[9] * f) / (l2 - c[4] * c[4]) -
                    c[5] * l2;
  return std::sqrt(n2);
}

}  // namespace spdc
