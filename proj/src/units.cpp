#include "spdc/units.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <string>
#include <utility>

#include "spdc/errors.hpp"

namespace spdc {

namespace {

struct UnitEntry {
  std::string_view symbol;
  Dimension dimension;
  double scale;
};

// Brightness is stored per Hz of (ordinary) bandwidth per mW of pump power.
constexpr std::array<UnitEntry, 32> kUnits{{
    {"", Dimension::kDimensionless, 1.0},
    {"%", Dimension::kDimensionless, 1e-2},
    {"Hz", Dimension::kFrequency, 1.0},
    {"kHz", Dimension::kFrequency, 1e3},
    {"MHz", Dimension::kFrequency, 1e6},
    {"GHz", Dimension::kFrequency, 1e9},
    {"THz", Dimension::kFrequency, 1e12},
    {"/s", Dimension::kRate, 1.0},
    {"Hz", Dimension::kRate, 1.0},
    {"kHz", Dimension::kRate, 1e3},
    {"MHz", Dimension::kRate, 1e6},
    {"s", Dimension::kTime, 1.0},
    {"ms", Dimension::kTime, 1e-3},
    {"us", Dimension::kTime, 1e-6},
    {"ns", Dimension::kTime, 1e-9},
    {"ps", Dimension::kTime, 1e-12},
    {"m", Dimension::kLength, 1.0},
    {"mm", Dimension::kLength, 1e-3},
    {"um", Dimension::kLength, 1e-6},
    {"nm", Dimension::kLength, 1e-9},
    {"W", Dimension::kPower, 1.0},
    {"mW", Dimension::kPower, 1e-3},
    {"uW", Dimension::kPower, 1e-6},
    {"nW", Dimension::kPower, 1e-9},
    {"C", Dimension::kTemperature, 1.0},
    {"degC", Dimension::kTemperature, 1.0},
    {"rad", Dimension::kAngle, 1.0},
    {"deg", Dimension::kAngle, kPi / 180.0},
    {"/(s Hz)", Dimension::kBrightness, 1.0},
    {"/(s kHz)", Dimension::kBrightness, 1e-3},
    {"/(s MHz)", Dimension::kBrightness, 1e-6},
    {"/(s GHz)", Dimension::kBrightness, 1e-9},
}};

std::string trim(std::string_view s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string_view::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

std::string_view dimension_name(Dimension d) {
  switch (d) {
    case Dimension::kDimensionless: return "dimensionless";
    case Dimension::kFrequency: return "frequency";
    case Dimension::kRate: return "rate";
    case Dimension::kTime: return "time";
    case Dimension::kLength: return "length";
    case Dimension::kPower: return "power";
    case Dimension::kTemperature: return "temperature";
    case Dimension::kAngle: return "angle";
    case Dimension::kBrightness: return "brightness";
  }
  return "?";
}

double parse_quantity(std::string_view text, Dimension expected) {
  const std::string s = trim(text);
  if (s.empty()) throw ConfigError("empty value where a " + std::string(dimension_name(expected)) + " was expected");
  double value = 0.0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), value);
  if (ec != std::errc()) throw ConfigError("cannot parse number in '" + s + "'");
  if (!std::isfinite(value)) throw ConfigError("non-finite value '" + s + "'");
  const std::string unit = trim(std::string_view(ptr, s.data() + s.size() - ptr));

  std::string accepted;
  for (const auto& u : kUnits) {
    if (u.dimension != expected) continue;
    if (u.symbol == unit) return value * u.scale;
    if (!u.symbol.empty()) {
      if (!accepted.empty()) accepted += ", ";
      accepted += u.symbol;
    }
  }
  if (unit.empty())
    throw ConfigError("value '" + s + "' needs a " + std::string(dimension_name(expected)) + " unit (" + accepted + ")");
  throw ConfigError("unit '" + unit + "' is not a " + std::string(dimension_name(expected)) + " unit; use one of: " +
                    accepted);
}

}  // namespace spdc
