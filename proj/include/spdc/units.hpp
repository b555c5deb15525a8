#pragma once

#include <numbers>
#include <string>
#include <string_view>

namespace spdc {

inline constexpr double kPi = std::numbers::pi;
inline constexpr double kTwoPi = 2.0 * std::numbers::pi;
inline constexpr double kSpeedOfLight = 299792458.0;  // m/s

// Linewidths are stored as angular FWHM (rad/s). Everything user-facing is
// quoted as Gamma/(2 pi) in Hz; these two helpers are the only conversion.
constexpr double angular_from_hz(double hz) { return kTwoPi * hz; }
constexpr double hz_from_angular(double rad_per_s) { return rad_per_s / kTwoPi; }

/// Physical dimension of a config quantity.
enum class Dimension {
  kDimensionless,  // plain number or percent
  kFrequency,      // Hz (ordinary, not angular)
  kRate,           // 1/s, accepts Hz spellings
  kTime,           // s
  kLength,         // m
  kPower,          // W
  kTemperature,    // degrees Celsius
  kAngle,          // rad
  kBrightness,     // pairs / (s Hz) per mW of pump
};

std::string_view dimension_name(Dimension d);

/// Parses "600 MHz", "250 ps", "3.1 %", "2.45e3 /(s MHz)" and converts to the
/// SI base of `expected`. Throws ConfigError naming the accepted units when
/// the suffix does not belong to that dimension.
double parse_quantity(std::string_view text, Dimension expected);

}  // namespace spdc
