#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "spdc/correlation_model.hpp"
#include "spdc/keyvalue.hpp"
#include "spdc/phasematching.hpp"

namespace spdc {

struct CrystalSection {
  WaveguideSpec waveguide;
  double pump_nm = 0.0;
  double signal_nm = 0.0;
  double spectrum_span_ghz = 2000.0;
  int spectrum_points = 401;
  /// Optional externally quoted dispersion slope, rad/(mm GHz).
  std::optional<double> reference_slope;
};

struct SourceSection {
  SourceOperatingPoint op;
  /// SPDC bandwidth B, rad/s. Derived from [crystal] when absent.
  std::optional<double> pm_bandwidth;
};

struct AnalyticSection {
  double tau_range = 5e-9;
  double tau_step = 10e-12;
  std::vector<double> powers_mw;
};

struct SimulateSection {
  std::string process = "pair";  // pair | thermal
  double duration = 1.0;
  double shard_duration = 1.0;
  double thermal_flux = 0.0;
  std::string thermal_channel = "idler";  // signal | idler
};

struct CorrelateSection {
  std::string signal_path;
  std::string idler_path;
  bool auto_correlation = false;
  std::int64_t bin_width_ps = 162;
  std::int64_t range_ps = 10000;
  std::int64_t window_ps = 6000;
  std::int64_t offset_ps = 0;
};

struct FitSection {
  std::string mode;  // characterization | cross | auto | fringe
  std::string input;
  std::string channel = "idler";  // channel of an auto-correlation histogram
};

struct EntangleSection {
  double mag_alpha = 1.0;
  double mag_beta = 1.0;
  double phi = 0.0;
  double visibility = 1.0;
  int fringe_points = 65;
  std::vector<double> correlators;
  std::vector<double> correlator_errors;
};

/// Whole configuration document, validated against the schema on load.
/// Physical quantities must carry unit suffixes. Relative paths are resolved
/// against the config file's directory.
struct RunConfig {
  std::optional<CrystalSection> crystal;
  std::optional<SourceSection> source;
  std::optional<FilterSpec> filter_s;
  std::optional<FilterSpec> filter_i;
  std::optional<DetectorSpec> det_s;
  std::optional<DetectorSpec> det_i;
  std::optional<AnalyticSection> analytic;
  std::optional<SimulateSection> simulate;
  std::optional<CorrelateSection> correlate;
  std::optional<FitSection> fit;
  std::optional<EntangleSection> entangle;
  std::uint64_t seed = 1;
  std::string hash;

  static RunConfig parse(const std::string& text, const std::string& base_dir = ".");
  static RunConfig load(const std::string& path);

  /// Throw ConfigError naming `section` when it is missing.
  const CrystalSection& require_crystal() const;
  const SourceSection& require_source() const;
  const FilterSpec& require_filter_s() const;
  const FilterSpec& require_filter_i() const;
  const DetectorSpec& require_det_s() const;
  const DetectorSpec& require_det_i() const;

  /// B in rad/s from [source] or, failing that, the crystal bandwidth.
  double pm_bandwidth() const;
};

}  // namespace spdc
