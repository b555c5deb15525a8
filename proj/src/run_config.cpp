#include "spdc/run_config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "spdc/errors.hpp"
#include "spdc/units.hpp"

namespace spdc {

namespace {

const std::map<std::string, std::vector<std::string>> kSchema = {
    {"run", {"seed"}},
    {"crystal",
     {"material", "sellmeier", "poling_period", "length", "temperature", "pump_wavelength", "signal_wavelength",
      "spectrum_span", "spectrum_points", "reference_slope"}},
    {"source", {"brightness", "pump_power", "pm_bandwidth"}},
    {"filter.signal", {"linewidth", "fsr", "transmission", "populations"}},
    {"filter.idler", {"linewidth", "fsr", "transmission", "populations"}},
    {"detector.signal", {"efficiency", "dark_rate", "jitter", "dead_time"}},
    {"detector.idler", {"efficiency", "dark_rate", "jitter", "dead_time"}},
    {"analytic", {"tau_range", "tau_step", "powers"}},
    {"simulate", {"process", "duration", "shard_duration", "thermal_flux", "thermal_channel"}},
    {"correlate", {"signal", "idler", "auto", "bin_width", "range", "window", "offset"}},
    {"fit", {"mode", "input", "channel"}},
    {"entangle", {"alpha", "beta", "phi", "visibility", "fringe_points", "correlators", "correlator_errors"}},
};

template <class F>
void validated(const std::string& section, F&& check) {
  try {
    check();
  } catch (const DomainError& e) {
    throw ConfigError("[" + section + "] " + e.what());
  }
}

std::string resolve_path(const std::string& base_dir, const std::string& path) {
  const std::filesystem::path p(path);
  if (p.is_absolute() || base_dir.empty()) return path;
  return (std::filesystem::path(base_dir) / p).lexically_normal().string();
}

bool parse_bool(const KeyValueDocument& doc, const std::string& section, const std::string& key, bool fallback) {
  const auto v = doc.find_string(section, key);
  if (!v) return fallback;
  if (*v == "yes" || *v == "true" || *v == "1") return true;
  if (*v == "no" || *v == "false" || *v == "0") return false;
  throw ConfigError("[" + section + "] " + key + ": expected yes or no, got '" + *v + "'", doc.entry(section, key).line);
}

std::int64_t picoseconds(const KeyValueDocument& doc, const std::string& section, const std::string& key,
                         std::int64_t fallback) {
  if (!doc.has(section, key)) return fallback;
  const double ps = doc.get_quantity(section, key, Dimension::kTime) * 1e12;
  const double rounded = std::round(ps);
  if (std::abs(ps - rounded) > 1e-6 * std::max(1.0, std::abs(ps)))
    throw ConfigError("[" + section + "] " + key + ": must be a whole number of picoseconds",
                      doc.entry(section, key).line);
  return static_cast<std::int64_t>(rounded);
}

std::string one_of(const KeyValueDocument& doc, const std::string& section, const std::string& key,
                   const std::vector<std::string>& allowed, std::optional<std::string> fallback = {}) {
  const auto v = fallback && !doc.has(section, key) ? fallback : doc.find_string(section, key);
  if (!v) return doc.get_string(section, key);  // throws the standard missing-key error
  for (const auto& a : allowed)
    if (*v == a) return *v;
  std::string list;
  for (const auto& a : allowed) list += (list.empty() ? "" : ", ") + a;
  const int line = doc.has(section, key) ? doc.entry(section, key).line : 0;
  throw ConfigError("[" + section + "] " + key + ": expected one of " + list + ", got '" + *v + "'", line);
}

FilterSpec read_filter(const KeyValueDocument& doc, const std::string& section) {
  FilterSpec f;
  f.gamma = angular_from_hz(doc.get_quantity(section, "linewidth", Dimension::kFrequency));
  f.fsr_hz = doc.get_quantity_or(section, "fsr", Dimension::kFrequency, 0.0);
  f.peak_transmission = doc.get_quantity_or(section, "transmission", Dimension::kDimensionless, 1.0);
  if (doc.has(section, "populations")) f.mode_populations = doc.get_list(section, "populations", Dimension::kDimensionless);
  validated(section, [&] { f.validate(); });
  return f;
}

DetectorSpec read_detector(const KeyValueDocument& doc, const std::string& section) {
  DetectorSpec d;
  d.efficiency = doc.get_quantity_or(section, "efficiency", Dimension::kDimensionless, 1.0);
  d.dark_rate = doc.get_quantity_or(section, "dark_rate", Dimension::kRate, 0.0);
  d.jitter_sigma = doc.get_quantity_or(section, "jitter", Dimension::kTime, 0.0);
  d.dead_time = doc.get_quantity_or(section, "dead_time", Dimension::kTime, 0.0);
  validated(section, [&] { d.validate(); });
  return d;
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text, const std::string& base_dir) {
  const KeyValueDocument doc = KeyValueDocument::parse(text);
  doc.reject_unknown(kSchema);
  RunConfig cfg;
  cfg.hash = fnv1a_hex(doc.canonical());

  if (doc.has_section("run")) {
    const long long seed = doc.get_integer_or("run", "seed", 1);
    if (seed < 0) throw ConfigError("[run] seed must be non-negative", doc.entry("run", "seed").line);
    cfg.seed = static_cast<std::uint64_t>(seed);
  }

  if (doc.has_section("crystal")) {
    CrystalSection c;
    if (doc.has("crystal", "sellmeier")) {
      c.waveguide.model = SellmeierModel::load(resolve_path(base_dir, doc.get_string("crystal", "sellmeier")));
      if (doc.has("crystal", "material")) doc.get_string("crystal", "material");
    } else {
      c.waveguide.model = SellmeierModel::bundled(material_from_string(doc.get_string("crystal", "material")));
    }
    c.waveguide.poling_period_um = doc.get_quantity("crystal", "poling_period", Dimension::kLength) * 1e6;
    c.waveguide.length_mm = doc.get_quantity("crystal", "length", Dimension::kLength) * 1e3;
    c.waveguide.temperature_c = doc.get_quantity("crystal", "temperature", Dimension::kTemperature);
    c.pump_nm = doc.get_quantity("crystal", "pump_wavelength", Dimension::kLength) * 1e9;
    c.signal_nm = doc.get_quantity("crystal", "signal_wavelength", Dimension::kLength) * 1e9;
    c.spectrum_span_ghz = doc.get_quantity_or("crystal", "spectrum_span", Dimension::kFrequency, 2000e9) * 1e-9;
    c.spectrum_points = static_cast<int>(doc.get_integer_or("crystal", "spectrum_points", 401));
    if (doc.has("crystal", "reference_slope"))
      c.reference_slope = doc.get_quantity("crystal", "reference_slope", Dimension::kDimensionless);
    validated("crystal", [&] {
      c.waveguide.validate();
      if (!(c.pump_nm > 0.0 && c.signal_nm > c.pump_nm)) throw DomainError("signal wavelength must exceed the pump's");
      if (c.spectrum_points < 2) throw DomainError("spectrum_points must be at least 2");
      if (!(c.spectrum_span_ghz > 0.0)) throw DomainError("spectrum_span must be positive");
    });
    cfg.crystal = c;
  }

  if (doc.has_section("source")) {
    SourceSection s;
    s.op.brightness = doc.get_quantity("source", "brightness", Dimension::kBrightness);
    s.op.pump_power_mw = doc.get_quantity("source", "pump_power", Dimension::kPower) * 1e3;
    if (doc.has("source", "pm_bandwidth"))
      s.pm_bandwidth = angular_from_hz(doc.get_quantity("source", "pm_bandwidth", Dimension::kFrequency));
    validated("source", [&] {
      s.op.validate();
      if (s.pm_bandwidth && !(*s.pm_bandwidth > 0.0)) throw DomainError("pm_bandwidth must be positive");
    });
    cfg.source = s;
  }

  if (doc.has_section("filter.signal")) cfg.filter_s = read_filter(doc, "filter.signal");
  if (doc.has_section("filter.idler")) cfg.filter_i = read_filter(doc, "filter.idler");
  if (doc.has_section("detector.signal")) cfg.det_s = read_detector(doc, "detector.signal");
  if (doc.has_section("detector.idler")) cfg.det_i = read_detector(doc, "detector.idler");

  if (doc.has_section("analytic")) {
    AnalyticSection a;
    a.tau_range = doc.get_quantity_or("analytic", "tau_range", Dimension::kTime, a.tau_range);
    a.tau_step = doc.get_quantity_or("analytic", "tau_step", Dimension::kTime, a.tau_step);
    if (doc.has("analytic", "powers"))
      for (double w : doc.get_list("analytic", "powers", Dimension::kPower)) a.powers_mw.push_back(w * 1e3);
    validated("analytic", [&] {
      if (!(a.tau_range > 0.0) || !(a.tau_step > 0.0)) throw DomainError("tau_range and tau_step must be positive");
      if (a.tau_range / a.tau_step > 1e6) throw DomainError("tau grid exceeds one million points");
      for (double p : a.powers_mw)
        if (!(p >= 0.0)) throw DomainError("powers must be non-negative");
    });
    cfg.analytic = a;
  }

  if (doc.has_section("simulate")) {
    SimulateSection s;
    s.process = one_of(doc, "simulate", "process", {"pair", "thermal"}, "pair");
    s.duration = doc.get_quantity("simulate", "duration", Dimension::kTime);
    s.shard_duration = doc.get_quantity_or("simulate", "shard_duration", Dimension::kTime, std::min(1.0, s.duration));
    if (s.process == "thermal") {
      s.thermal_flux = doc.get_quantity("simulate", "thermal_flux", Dimension::kRate);
      s.thermal_channel = one_of(doc, "simulate", "thermal_channel", {"signal", "idler"}, "idler");
    }
    validated("simulate", [&] {
      if (!(s.duration > 0.0) || !(s.shard_duration > 0.0)) throw DomainError("durations must be positive");
    });
    cfg.simulate = s;
  }

  if (doc.has_section("correlate")) {
    CorrelateSection c;
    c.auto_correlation = parse_bool(doc, "correlate", "auto", false);
    c.signal_path = resolve_path(base_dir, doc.get_string("correlate", "signal"));
    if (!c.auto_correlation) c.idler_path = resolve_path(base_dir, doc.get_string("correlate", "idler"));
    c.bin_width_ps = picoseconds(doc, "correlate", "bin_width", c.bin_width_ps);
    c.range_ps = picoseconds(doc, "correlate", "range", c.range_ps);
    c.window_ps = picoseconds(doc, "correlate", "window", c.window_ps);
    c.offset_ps = picoseconds(doc, "correlate", "offset", c.offset_ps);
    validated("correlate", [&] {
      if (c.bin_width_ps <= 0) throw DomainError("bin_width must be positive");
      if (c.range_ps < 0 || c.range_ps % c.bin_width_ps != 0)
        throw DomainError("range must be a non-negative multiple of bin_width");
      if (c.window_ps <= 0) throw DomainError("window must be positive");
    });
    cfg.correlate = c;
  }

  if (doc.has_section("fit")) {
    FitSection f;
    f.mode = one_of(doc, "fit", "mode", {"characterization", "cross", "auto", "fringe"});
    f.input = resolve_path(base_dir, doc.get_string("fit", "input"));
    if (f.mode == "auto") f.channel = one_of(doc, "fit", "channel", {"signal", "idler"}, "idler");
    cfg.fit = f;
  }

  if (doc.has_section("entangle")) {
    EntangleSection e;
    e.mag_alpha = doc.get_quantity_or("entangle", "alpha", Dimension::kDimensionless, 1.0);
    e.mag_beta = doc.get_quantity_or("entangle", "beta", Dimension::kDimensionless, 1.0);
    e.phi = doc.get_quantity_or("entangle", "phi", Dimension::kAngle, 0.0);
    e.visibility = doc.get_quantity_or("entangle", "visibility", Dimension::kDimensionless, 1.0);
    e.fringe_points = static_cast<int>(doc.get_integer_or("entangle", "fringe_points", 65));
    if (doc.has("entangle", "correlators"))
      e.correlators = doc.get_list("entangle", "correlators", Dimension::kDimensionless);
    if (doc.has("entangle", "correlator_errors"))
      e.correlator_errors = doc.get_list("entangle", "correlator_errors", Dimension::kDimensionless);
    validated("entangle", [&] {
      if (!e.correlators.empty() && e.correlators.size() != 4)
        throw DomainError("correlators needs four values: E(X1,Y1), E(X1,Y2), E(X2,Y1), E(X2,Y2)");
      if (!e.correlator_errors.empty() && e.correlator_errors.size() != e.correlators.size())
        throw DomainError("correlator_errors must match correlators");
      if (e.fringe_points < 2) throw DomainError("fringe_points must be at least 2");
      if (!(e.visibility >= 0.0 && e.visibility <= 1.0)) throw DomainError("visibility must lie in [0, 1]");
    });
    cfg.entangle = e;
  }

  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse(ss.str(), std::filesystem::path(path).parent_path().string());
}

namespace {

template <class T>
const T& require(const std::optional<T>& v, const char* section) {
  if (!v) throw ConfigError(std::string("config lacks required section [") + section + "]");
  return *v;
}

}  // namespace

const CrystalSection& RunConfig::require_crystal() const { return require(crystal, "crystal"); }
const SourceSection& RunConfig::require_source() const { return require(source, "source"); }
const FilterSpec& RunConfig::require_filter_s() const { return require(filter_s, "filter.signal"); }
const FilterSpec& RunConfig::require_filter_i() const { return require(filter_i, "filter.idler"); }
const DetectorSpec& RunConfig::require_det_s() const { return require(det_s, "detector.signal"); }
const DetectorSpec& RunConfig::require_det_i() const { return require(det_i, "detector.idler"); }

double RunConfig::pm_bandwidth() const {
  if (source && source->pm_bandwidth) return *source->pm_bandwidth;
  if (!crystal) throw ConfigError("set [source] pm_bandwidth or provide a [crystal] section");
  const auto& c = *crystal;
  const double fwhm = fwhm_bandwidth_ghz(dispersion_slope(c.waveguide, c.pump_nm, c.signal_nm), c.waveguide.length_mm);
  return angular_from_hz(fwhm * 1e9);
}

}  // namespace spdc
