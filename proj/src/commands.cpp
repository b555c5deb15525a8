#include "spdc/commands.hpp"

#include <omp.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "spdc/correlation_model.hpp"
#include "spdc/errors.hpp"
#include "spdc/estimation.hpp"
#include "spdc/event_simulator.hpp"
#include "spdc/phasematching.hpp"
#include "spdc/polarization.hpp"
#include "spdc/sellmeier.hpp"
#include "spdc/timestamp_stream.hpp"
#include "spdc/units.hpp"

namespace spdc {

namespace {

using Json = nlohmann::ordered_json;
namespace fs = std::filesystem;

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string provenance_line(const std::string& hash) {
  return std::string("# ") + kToolName + " " + kToolVersion + " config " + hash + "\n";
}

Json provenance(const std::string& hash) {
  Json j;
  j["tool"] = kToolName;
  j["version"] = kToolVersion;
  j["config_hash"] = hash;
  return j;
}

Json number(double v) { return std::isfinite(v) ? Json(v) : Json(nullptr); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write '" + path.string() + "'");
  out << text;
  if (!out) throw IoError("failed writing '" + path.string() + "'");
}

class CsvWriter {
 public:
  CsvWriter(const std::string& hash, const std::string& header) {
    text_ << std::setprecision(12) << provenance_line(hash) << header << '\n';
  }
  template <class... T>
  void row(const T&... values) {
    bool first = true;
    ((text_ << (first ? "" : ",") << values, first = false), ...);
    text_ << '\n';
  }
  std::string str() const { return text_.str(); }

 private:
  std::ostringstream text_;
};

fs::path output_dir(const CommandOptions& options) {
  fs::path dir(options.out_dir.empty() ? "." : options.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory '" + dir.string() + "': " + ec.message());
  return dir;
}

std::vector<double> linear_grid(double lo, double hi, int points) {
  std::vector<double> out(static_cast<std::size_t>(points));
  for (int k = 0; k < points; ++k) out[static_cast<std::size_t>(k)] = lo + (hi - lo) * k / (points - 1);
  return out;
}

// --------------------------------------------------------------- bandwidth

Json cmd_bandwidth(const RunConfig& cfg, const fs::path& dir) {
  const CrystalSection& c = cfg.require_crystal();
  const WaveguideSpec& wg = c.waveguide;
  const double idler_nm = idler_wavelength_nm(c.pump_nm, c.signal_nm);
  const double t = wg.temperature_c;
  const double slope = dispersion_slope(wg, c.pump_nm, c.signal_nm);
  const double fwhm = fwhm_bandwidth_ghz(slope, wg.length_mm);
  const double matched_period = phasematching_period_um(wg, c.pump_nm, c.signal_nm);

  Json report = provenance(cfg.hash);
  report["material"] = to_string(wg.model.material);
  report["sellmeier_citation"] = wg.model.citation;
  report["pump_nm"] = c.pump_nm;
  report["signal_nm"] = c.signal_nm;
  report["idler_nm"] = idler_nm;
  report["temperature_c"] = t;
  report["n_pump"] = refractive_index(wg.model, c.pump_nm * 1e-3, t);
  report["n_signal"] = refractive_index(wg.model, c.signal_nm * 1e-3, t);
  report["n_idler"] = refractive_index(wg.model, idler_nm * 1e-3, t);
  report["poling_period_um"] = wg.poling_period_um;
  report["phase_mismatch_per_mm"] = phase_mismatch(wg, c.pump_nm, c.signal_nm);
  report["matched_period_um"] = matched_period;
  try {
    report["phasematching_temperature_c"] = solve_phasematching_temperature(wg, c.pump_nm, c.signal_nm);
  } catch (const NumericalError& e) {
    report["phasematching_temperature_c"] = nullptr;
    report["phasematching_temperature_note"] = e.what();
  }
  report["dispersion_slope_per_mm_ghz"] = slope;
  report["length_mm"] = wg.length_mm;
  report["fwhm_ghz"] = fwhm;
  if (c.reference_slope) {
    report["reference_slope_per_mm_ghz"] = *c.reference_slope;
    report["reference_fwhm_ghz"] = fwhm_bandwidth_ghz(*c.reference_slope, wg.length_mm);
  }

  const auto detunings = linear_grid(-0.5 * c.spectrum_span_ghz, 0.5 * c.spectrum_span_ghz, c.spectrum_points);
  WaveguideSpec matched = wg;
  matched.poling_period_um = matched_period;
  const auto at_period = spdc_spectrum(wg, c.pump_nm, c.signal_nm, detunings);
  const auto at_match = spdc_spectrum(matched, c.pump_nm, c.signal_nm, detunings);
  CsvWriter csv(cfg.hash, "detuning_ghz,intensity,intensity_matched_period");
  for (std::size_t k = 0; k < detunings.size(); ++k) csv.row(detunings[k], at_period[k], at_match[k]);
  write_text(dir / "spectrum.csv", csv.str());
  write_text(dir / "bandwidth.json", report.dump(2) + "\n");
  return report;
}

// ---------------------------------------------------------------- analytic

DetectorSpec without_jitter(DetectorSpec d) {
  d.jitter_sigma = 0.0;
  return d;
}

double g2_or_nan(const SourceOperatingPoint& op, const FilterSpec& fs_, const FilterSpec& fi,
                 const DetectorSpec& ds, const DetectorSpec& di, double tau) {
  const Fluxes w = fluxes(op, fs_, fi, ds, di);
  if (!(w.signal > 0.0) || !(w.idler > 0.0)) return kNaN;
  return g2_cross(op, fs_, fi, ds, di, tau);
}

Json cmd_analytic(const RunConfig& cfg, const fs::path& dir) {
  const SourceSection& src = cfg.require_source();
  const FilterSpec& fs_ = cfg.require_filter_s();
  const FilterSpec& fi = cfg.require_filter_i();
  const DetectorSpec& ds = cfg.require_det_s();
  const DetectorSpec& di = cfg.require_det_i();
  const AnalyticSection a = cfg.analytic.value_or(AnalyticSection{});

  std::optional<double> bandwidth;
  if (src.pm_bandwidth || cfg.crystal) bandwidth = cfg.pm_bandwidth();

  const int half = static_cast<int>(std::floor(a.tau_range / a.tau_step + 1e-9));
  CsvWriter cross(cfg.hash, "tau_ps,g2_no_jitter,g2_jitter");
  const double ks = schmidt_number(fs_.mode_populations);
  const double ki = schmidt_number(fi.mode_populations);
  const double sigma_ss = std::sqrt(2.0) * ds.jitter_sigma;
  const double sigma_ii = std::sqrt(2.0) * di.jitter_sigma;
  CsvWriter autos(cfg.hash, "tau_ps,g2_signal,g2_idler");
  for (int k = -half; k <= half; ++k) {
    const double tau = k * a.tau_step;
    cross.row(tau * 1e12, g2_or_nan(src.op, fs_, fi, without_jitter(ds), without_jitter(di), tau),
              g2_or_nan(src.op, fs_, fi, ds, di, tau));
    autos.row(tau * 1e12, g2_auto(ks, fs_.gamma, sigma_ss, tau), g2_auto(ki, fi.gamma, sigma_ii, tau));
  }

  std::vector<double> powers = a.powers_mw;
  if (powers.empty())
    for (int k = 0; k <= 24; ++k) powers.push_back(0.01 * std::pow(300.0, k / 24.0));
  CsvWriter rates(cfg.hash, "power_mW,W_s,W_i,W_2,g2si0");
  for (double p : powers) {
    SourceOperatingPoint op = src.op;
    op.pump_power_mw = p;
    const Fluxes w = fluxes(op, fs_, fi, ds, di);
    rates.row(p, w.signal, w.idler, w.pair, g2_or_nan(op, fs_, fi, ds, di, 0.0));
  }

  const Fluxes w = fluxes(src.op, fs_, fi, ds, di);
  Json report = provenance(cfg.hash);
  report["pump_power_mW"] = src.op.pump_power_mw;
  report["r_over_b"] = src.op.r_over_b();
  report["W_s"] = w.signal;
  report["W_i"] = w.idler;
  report["W_2"] = w.pair;
  report["g2si0"] = number(g2_or_nan(src.op, fs_, fi, ds, di, 0.0));
  report["jitter_factor"] = jitter_factor(fs_.gamma, fi.gamma, combined_jitter(ds, di), 0.0);
  report["schmidt_signal"] = ks;
  report["schmidt_idler"] = ki;
  report["warnings"] = model_warnings(src.op, fs_, fi, bandwidth);
  write_text(dir / "g2_cross.csv", cross.str());
  write_text(dir / "g2_auto.csv", autos.str());
  write_text(dir / "rates.csv", rates.str());
  write_text(dir / "analytic.json", report.dump(2) + "\n");
  return report;
}

// ---------------------------------------------------------------- simulate

Json stream_summary(const TimestampStream& s, const std::string& file) {
  Json j;
  j["file"] = file;
  j["channel"] = s.channel;
  j["events"] = s.timestamps.size();
  j["rate"] = s.rate();
  return j;
}

Json cmd_simulate(const RunConfig& cfg, const fs::path& dir) {
  if (!cfg.simulate) throw ConfigError("config lacks required section [simulate]");
  const SimulateSection& sim = *cfg.simulate;
  Json report = provenance(cfg.hash);
  report["seed"] = cfg.seed;
  report["process"] = sim.process;
  report["duration_s"] = sim.duration;
  Json streams = Json::array();

  if (sim.process == "pair") {
    PairProcessConfig pc;
    pc.op = cfg.require_source().op;
    pc.filter_s = cfg.require_filter_s();
    pc.filter_i = cfg.require_filter_i();
    pc.det_s = cfg.require_det_s();
    pc.det_i = cfg.require_det_i();
    pc.pm_bandwidth = cfg.pm_bandwidth();
    pc.seed = cfg.seed;
    pc.duration = sim.duration;
    pc.shard_duration = sim.shard_duration;
    PairStreams out = simulate_pair_stream(pc);
    out.signal.config_hash = out.idler.config_hash = cfg.hash;
    write_ttag(out.signal, (dir / "signal.ttag").string());
    write_ttag(out.idler, (dir / "idler.ttag").string());
    streams.push_back(stream_summary(out.signal, "signal.ttag"));
    streams.push_back(stream_summary(out.idler, "idler.ttag"));
    report["created_pairs"] = out.created_pairs;
  } else {
    const bool signal = sim.thermal_channel == "signal";
    const FilterSpec& f = signal ? cfg.require_filter_s() : cfg.require_filter_i();
    ThermalConfig tc;
    tc.gamma = f.gamma;
    tc.flux = sim.thermal_flux;
    tc.modes.clear();
    for (std::size_t n = 0; n < f.mode_populations.size(); ++n) {
      // Mode order 0, +1, -1, +2, -2, ... free spectral ranges from the target.
      const double order = n == 0 ? 0.0 : (n % 2 == 1 ? 1.0 : -1.0) * static_cast<double>((n + 1) / 2);
      tc.modes.push_back({f.mode_populations[n], order * f.fsr_hz});
    }
    tc.det = signal ? cfg.require_det_s() : cfg.require_det_i();
    tc.seed = cfg.seed;
    tc.duration = sim.duration;
    tc.shard_duration = sim.shard_duration;
    tc.channel = signal ? 0 : 1;
    TimestampStream s = simulate_thermal_stream(tc);
    s.config_hash = cfg.hash;
    write_ttag(s, (dir / "thermal.ttag").string());
    streams.push_back(stream_summary(s, "thermal.ttag"));
  }
  report["streams"] = streams;
  write_text(dir / "simulate.json", report.dump(2) + "\n");
  return report;
}

// --------------------------------------------------------------- correlate

Json cmd_correlate(const RunConfig& cfg, const fs::path& dir) {
  if (!cfg.correlate) throw ConfigError("config lacks required section [correlate]");
  const CorrelateSection& c = *cfg.correlate;
  const TimestampStream a = read_ttag(c.signal_path);
  std::optional<TimestampStream> b_storage;
  if (!c.auto_correlation) b_storage = read_ttag(c.idler_path);
  const TimestampStream& b = c.auto_correlation ? a : *b_storage;

  const CorrelationHistogram h = coincidence_histogram(a, b, c.bin_width_ps, c.range_ps);
  write_histogram(h, (dir / "histogram.csv").string(), cfg.hash);

  Json report = provenance(cfg.hash);
  report["auto_correlation"] = c.auto_correlation;
  report["bin_width_ps"] = c.bin_width_ps;
  report["range_ps"] = c.range_ps;
  report["duration_s"] = h.duration_s;
  report["rate_a"] = h.rate_a;
  report["rate_b"] = h.rate_b;
  report["coincidences"] = h.total();
  if (!c.auto_correlation && a.duration_ps > 0) {
    const PairRate r = windowed_pair_rate(a, b, c.window_ps, c.offset_ps);
    Json pr;
    pr["window_ps"] = c.window_ps;
    pr["offset_ps"] = c.offset_ps;
    pr["coincidences"] = r.coincidences;
    pr["raw"] = r.raw;
    pr["subtracted"] = r.subtracted;
    pr["error"] = r.error;
    report["pair_rate"] = pr;
  }
  write_text(dir / "correlate.json", report.dump(2) + "\n");
  return report;
}

// --------------------------------------------------------------------- fit

FringeData load_fringe_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open fringe dataset '" + path + "'");
  FringeData data;
  std::string line;
  bool header = true;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    if (header) {
      if (cells.size() < 2 || cells[0].rfind("theta", 0) != 0)
        throw ConfigError("fringe CSV must start with a theta column followed by count columns", line_no);
      data.counts.resize(cells.size() - 1);
      header = false;
      continue;
    }
    if (cells.size() != data.counts.size() + 1) throw ConfigError("fringe CSV row has the wrong column count", line_no);
    try {
      data.theta.push_back(std::stod(cells[0]));
      for (std::size_t k = 1; k < cells.size(); ++k) data.counts[k - 1].push_back(std::stod(cells[k]));
    } catch (const std::exception&) {
      throw ConfigError("fringe CSV holds a non-numeric value", line_no);
    }
  }
  if (header) throw ConfigError("fringe CSV is empty");
  return data;
}

Json cmd_fit(const RunConfig& cfg, const fs::path& dir, bool* converged) {
  if (!cfg.fit) throw ConfigError("config lacks required section [fit]");
  const FitSection& f = *cfg.fit;
  FitResult result;
  if (f.mode == "characterization") {
    CharacterizationFixed fixed;
    fixed.gamma_s = cfg.require_filter_s().gamma;
    fixed.gamma_i = cfg.require_filter_i().gamma;
    fixed.dark_s = cfg.require_det_s().dark_rate;
    fixed.dark_i = cfg.require_det_i().dark_rate;
    fixed.p0 = cfg.require_filter_s().p0();
    fixed.sigma = combined_jitter(cfg.require_det_s(), cfg.require_det_i());
    result = fit_characterization(PowerSweepDataset::load_csv(f.input), fixed);
  } else if (f.mode == "cross") {
    LineshapeFixed fixed;
    fixed.gamma_s = cfg.require_filter_s().gamma;
    fixed.gamma_i = cfg.require_filter_i().gamma;
    fixed.sigma = combined_jitter(cfg.require_det_s(), cfg.require_det_i());
    result = fit_lineshape(read_histogram(f.input), LineshapeModel::kCross, fixed);
  } else if (f.mode == "auto") {
    const bool signal = f.channel == "signal";
    LineshapeFixed fixed;
    fixed.gamma_s = (signal ? cfg.require_filter_s() : cfg.require_filter_i()).gamma;
    fixed.sigma = std::sqrt(2.0) * (signal ? cfg.require_det_s() : cfg.require_det_i()).jitter_sigma;
    result = fit_lineshape(read_histogram(f.input), LineshapeModel::kAuto, fixed);
  } else {
    result = fit_fringe(load_fringe_csv(f.input));
  }
  Json report = provenance(cfg.hash);
  report["mode"] = f.mode;
  report["fit"] = Json::parse(result.to_json());
  write_text(dir / "fit.json", report.dump(2) + "\n");
  *converged = result.converged;
  return report;
}

// ---------------------------------------------------------------- entangle

Json cmd_entangle(const RunConfig& cfg, const fs::path& dir) {
  const EntangleSection e = cfg.entangle.value_or(EntangleSection{});
  const TwoQubitState state = pair_state(e.mag_alpha, e.mag_beta, e.phi, e.visibility);
  const auto theta = linear_grid(0.0, kPi, e.fringe_points);
  const FringeCurve curve = fringe_curve(state, theta);
  CsvWriter fringe(cfg.hash, "theta_rad,p_tt,p_tr,p_rt,p_rr");
  for (std::size_t k = 0; k < theta.size(); ++k) {
    const auto& p = curve.probabilities[k];
    fringe.row(theta[k], p[0], p[1], p[2], p[3]);
  }

  const ChshSettings settings = optimal_settings(e.phi);
  const double model_e[4] = {analyzer_correlation(state, settings.signal_y1, settings.idler_x1),
                             analyzer_correlation(state, settings.signal_y2, settings.idler_x1),
                             analyzer_correlation(state, settings.signal_y1, settings.idler_x2),
                             analyzer_correlation(state, settings.signal_y2, settings.idler_x2)};
  const char* labels[4] = {"X1Y1", "X1Y2", "X2Y1", "X2Y2"};
  CsvWriter chsh(cfg.hash, "setting,E_model,E_measured,E_error");
  for (int k = 0; k < 4; ++k) {
    const auto uk = static_cast<std::size_t>(k);
    const double measured = e.correlators.empty() ? kNaN : e.correlators[uk];
    const double error = e.correlator_errors.empty() ? kNaN : e.correlator_errors[uk];
    chsh.row(labels[k], model_e[k], measured, error);
  }

  Json report = provenance(cfg.hash);
  report["phi_rad"] = e.phi;
  report["visibility_input"] = e.visibility;
  report["fringe_visibility"] = visibility(curve);
  report["theta_plus_rad"] = settings.theta_plus;
  report["theta_minus_rad"] = settings.theta_minus;
  report["signal_hwp_y1_rad"] = settings.signal_y1.plates.back().angle;
  report["signal_hwp_y2_rad"] = settings.signal_y2.plates.back().angle;
  report["idler_hwp_x1_rad"] = settings.idler_x1.plates.back().angle;
  report["idler_hwp_x2_rad"] = settings.idler_x2.plates.back().angle;
  report["S_model"] = chsh_value(state, settings);
  if (!e.correlators.empty()) {
    Correlator c[4];
    for (std::size_t k = 0; k < 4; ++k)
      c[k] = {e.correlators[k], e.correlator_errors.empty() ? 0.0 : e.correlator_errors[k]};
    const Correlator s = chsh_parameter(c[0], c[1], c[2], c[3]);
    report["S"] = s.value;
    report["S_error"] = s.error;
  }
  write_text(dir / "state.json", state.to_json() + "\n");
  write_text(dir / "fringe.csv", fringe.str());
  write_text(dir / "chsh.csv", chsh.str());
  write_text(dir / "entangle.json", report.dump(2) + "\n");
  return report;
}

std::string headline(const std::string& name, const Json& r) {
  std::ostringstream out;
  out << std::setprecision(6) << name << ":";
  if (name == "bandwidth") out << " FWHM " << r["fwhm_ghz"].get<double>() << " GHz";
  if (name == "bandwidth" && r.contains("reference_fwhm_ghz"))
    out << " (reference slope: " << r["reference_fwhm_ghz"].get<double>() << " GHz)";
  if (name == "analytic" && r["g2si0"].is_number()) out << " g2si(0) = " << r["g2si0"].get<double>();
  if (name == "simulate")
    for (const auto& s : r["streams"]) out << " " << s["file"].get<std::string>() << " " << s["events"] << " events";
  if (name == "correlate") out << " " << r["coincidences"] << " coincidences";
  if (name == "fit")
    for (const auto& p : r["fit"]["parameters"])
      out << " " << p["name"].get<std::string>() << " = " << p["value"].get<double>() << " +- "
          << p["error"].get<double>();
  if (name == "entangle" && r.contains("S")) out << " S = " << r["S"].get<double>() << " +- " << r["S_error"].get<double>();
  if (name == "entangle") out << " model S = " << r["S_model"].get<double>();
  return out.str();
}

}  // namespace

void write_histogram(const CorrelationHistogram& h, const std::string& csv_path, const std::string& config_hash) {
  const bool normalizable = h.rate_a > 0.0 && h.rate_b > 0.0 && h.duration_s > 0.0;
  std::vector<G2Point> g2;
  if (normalizable) g2 = g2_estimate(h);
  CsvWriter csv(config_hash, "tau_ps,counts,g2,g2_err");
  for (std::size_t k = 0; k < h.counts.size(); ++k) {
    if (normalizable)
      csv.row(h.tau_ps(k), h.counts[k], g2[k].g2, g2[k].error);
    else
      csv.row(h.tau_ps(k), h.counts[k], "nan", "nan");
  }
  write_text(csv_path, csv.str());

  Json side = provenance(config_hash);
  side["bin_width_ps"] = h.bin_width_ps;
  side["range_ps"] = h.range_ps;
  side["duration_s"] = h.duration_s;
  side["rate_a"] = h.rate_a;
  side["rate_b"] = h.rate_b;
  side["auto_correlation"] = h.auto_correlation;
  side["total"] = h.total();
  write_text(fs::path(csv_path).replace_extension(".json"), side.dump(2) + "\n");
}

CorrelationHistogram read_histogram(const std::string& csv_path) {
  const fs::path side_path = fs::path(csv_path).replace_extension(".json");
  std::ifstream side_in(side_path);
  if (!side_in) throw IoError("cannot open histogram sidecar '" + side_path.string() + "'");
  CorrelationHistogram h;
  try {
    const Json side = Json::parse(side_in);
    h.bin_width_ps = side.at("bin_width_ps").get<std::int64_t>();
    h.range_ps = side.at("range_ps").get<std::int64_t>();
    h.duration_s = side.at("duration_s").get<double>();
    h.rate_a = side.at("rate_a").get<double>();
    h.rate_b = side.at("rate_b").get<double>();
    h.auto_correlation = side.at("auto_correlation").get<bool>();
    h.config_hash = side.at("config_hash").get<std::string>();
  } catch (const nlohmann::json::exception& e) {
    throw IoError("malformed histogram sidecar '" + side_path.string() + "': " + e.what());
  }
  std::ifstream in(csv_path);
  if (!in) throw IoError("cannot open histogram '" + csv_path + "'");
  std::string line;
  bool header = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (header) {
      header = false;
      continue;
    }
    const auto c1 = line.find(',');
    const auto c2 = line.find(',', c1 + 1);
    if (c1 == std::string::npos) throw IoError("malformed histogram row '" + line + "'");
    h.counts.push_back(std::stoull(line.substr(c1 + 1, c2 - c1 - 1)));
  }
  if (h.bin_width_ps <= 0 || h.counts.size() != static_cast<std::size_t>(2 * h.range_ps / h.bin_width_ps + 1))
    throw IoError("histogram '" + csv_path + "' does not match its sidecar");
  return h;
}

int run_command(const std::string& name, const CommandOptions& options, std::ostream& out, std::ostream& err) {
  try {
    if (options.threads > 0) omp_set_num_threads(options.threads);
    RunConfig cfg = RunConfig::load(options.config_path);
    if (options.seed) cfg.seed = *options.seed;
    const fs::path dir = output_dir(options);
    Json report;
    int code = kExitOk;
    if (name == "bandwidth") {
      report = cmd_bandwidth(cfg, dir);
    } else if (name == "analytic") {
      report = cmd_analytic(cfg, dir);
    } else if (name == "simulate") {
      report = cmd_simulate(cfg, dir);
    } else if (name == "correlate") {
      report = cmd_correlate(cfg, dir);
    } else if (name == "fit") {
      bool converged = false;
      report = cmd_fit(cfg, dir, &converged);
      if (!converged) {
        err << "fit did not converge within the iteration limit\n";
        code = kExitNumerical;
      }
    } else if (name == "entangle") {
      report = cmd_entangle(cfg, dir);
    } else {
      err << "unknown command '" << name << "'\n";
      return kExitConfig;
    }
    if (options.json)
      out << report.dump() << "\n";
    else
      out << headline(name, report) << "\n";
    return code;
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const DomainError& e) {
    err << "invalid input: " << e.what() << "\n";
    return kExitConfig;
  } catch (const NumericalError& e) {
    err << "numerical failure: " << e.what() << "\n";
    return kExitNumerical;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitFailure;
  }
}

}  // namespace spdc
