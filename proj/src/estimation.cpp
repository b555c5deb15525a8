#include "spdc/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <tuple>

#include "spdc/correlation_model.hpp"
#include "spdc/errors.hpp"
#include "spdc/units.hpp"
#include "json.hpp"

namespace spdc {

namespace {

double sum_of_squares(const Eigen::VectorXd& r) {
  const double s = r.squaredNorm();
  return std::isfinite(s) ? s : std::numeric_limits<double>::infinity();
}

Eigen::MatrixXd jacobian(const ResidualFunction& f, const Eigen::VectorXd& p, const Eigen::VectorXd& scale,
                         Eigen::Index rows) {
  Eigen::MatrixXd j(rows, p.size());
  for (Eigen::Index k = 0; k < p.size(); ++k) {
    const double h = 1e-6 * std::max(std::abs(p[k]), scale[k]);
    Eigen::VectorXd up = p, down = p;
    up[k] += h;
    down[k] -= h;
    j.col(k) = (f(up) - f(down)) / (up[k] - down[k]);
  }
  return j;
}

Eigen::MatrixXd invert_normal_matrix(const Eigen::MatrixXd& a, bool allow_singular) {
  const Eigen::Index n = a.rows();
  Eigen::VectorXd d(n);
  for (Eigen::Index k = 0; k < n; ++k) d[k] = a(k, k) > 0.0 ? 1.0 / std::sqrt(a(k, k)) : 0.0;
  const Eigen::MatrixXd scaled = d.asDiagonal() * a * d.asDiagonal();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(scaled);
  const Eigen::VectorXd ev = eig.eigenvalues();
  const double largest = ev.maxCoeff();
  const double cutoff = 1e-12 * std::max(largest, 0.0);
  const bool singular = !(largest > 0.0) || ev.minCoeff() <= cutoff || (d.array() == 0.0).any();
  if (singular && !allow_singular)
    throw NumericalError("degenerate design: the normal equations are singular for this dataset");
  Eigen::VectorXd inv(n);
  for (Eigen::Index k = 0; k < n; ++k) inv[k] = ev[k] > cutoff ? 1.0 / ev[k] : 0.0;
  Eigen::MatrixXd cov = d.asDiagonal() * (eig.eigenvectors() * inv.asDiagonal() * eig.eigenvectors().transpose()) *
                        d.asDiagonal();
  return 0.5 * (cov + cov.transpose());
}

}  // namespace

LmResult levenberg_marquardt(const ResidualFunction& residuals, Eigen::VectorXd start, const LmOptions& options) {
  const Eigen::Index n = start.size();
  Eigen::VectorXd scale = options.scale;
  if (scale.size() != n) {
    scale.resize(n);
    for (Eigen::Index k = 0; k < n; ++k) scale[k] = start[k] != 0.0 ? std::abs(start[k]) : 1.0;
  }

  LmResult out;
  out.params = std::move(start);
  Eigen::VectorXd r = residuals(out.params);
  out.chi2 = sum_of_squares(r);
  if (!std::isfinite(out.chi2)) throw NumericalError("fit model is not finite at the starting point");
  if (r.size() < n) throw NumericalError("degenerate design: fewer data points than parameters");

  double lambda = 1e-3;
  Eigen::MatrixXd j = jacobian(residuals, out.params, scale, r.size());
  while (out.iterations < options.max_iterations) {
    ++out.iterations;
    const Eigen::MatrixXd a = j.transpose() * j;
    const Eigen::VectorXd g = j.transpose() * r;
    Eigen::MatrixXd damped = a;
    for (Eigen::Index k = 0; k < n; ++k) damped(k, k) += lambda * std::max(a(k, k), 1e-300);
    const Eigen::VectorXd step = damped.ldlt().solve(-g);

    double relative = 0.0;
    for (Eigen::Index k = 0; k < n; ++k)
      relative = std::max(relative, std::abs(step[k]) / std::max(std::abs(out.params[k]), scale[k]));
    if (!std::isfinite(relative)) {
      lambda *= 10.0;
      continue;
    }

    const Eigen::VectorXd trial = out.params + step;
    const Eigen::VectorXd r_trial = residuals(trial);
    const double chi2_trial = sum_of_squares(r_trial);
    if (chi2_trial <= out.chi2) {
      out.params = trial;
      r = r_trial;
      out.chi2 = chi2_trial;
      lambda = std::max(lambda / 10.0, 1e-12);
      if (relative < options.relative_step) {
        out.converged = true;
        break;
      }
      j = jacobian(residuals, out.params, scale, r.size());
    } else {
      if (relative < options.relative_step) {
        out.converged = true;
        break;
      }
      lambda *= 10.0;
      if (lambda > 1e30) break;
    }
  }

  out.covariance = invert_normal_matrix(j.transpose() * j, options.allow_singular);
  return out;
}

double FitResult::value(const std::string& name) const {
  for (std::size_t k = 0; k < names.size(); ++k)
    if (names[k] == name) return values[k];
  for (const auto& d : derived)
    if (d.name == name) return d.value;
  throw DomainError("fit result has no parameter named '" + name + "'");
}

double FitResult::error(const std::string& name) const {
  for (std::size_t k = 0; k < names.size(); ++k)
    if (names[k] == name) return errors[k];
  for (const auto& d : derived)
    if (d.name == name) return d.error;
  throw DomainError("fit result has no parameter named '" + name + "'");
}

std::string FitResult::to_json() const {
  nlohmann::ordered_json doc;
  doc["model"] = model;
  doc["converged"] = converged;
  doc["iterations"] = iterations;
  doc["chi2"] = chi2;
  doc["dof"] = dof;
  doc["chi2_per_dof"] = chi2_per_dof();
  auto params = nlohmann::ordered_json::array();
  for (std::size_t k = 0; k < names.size(); ++k)
    params.push_back({{"name", names[k]}, {"value", values[k]}, {"error", errors[k]}});
  doc["parameters"] = params;
  auto cov = nlohmann::ordered_json::array();
  for (Eigen::Index r = 0; r < covariance.rows(); ++r) {
    auto row = nlohmann::ordered_json::array();
    for (Eigen::Index c = 0; c < covariance.cols(); ++c) row.push_back(covariance(r, c));
    cov.push_back(row);
  }
  doc["covariance"] = cov;
  auto der = nlohmann::ordered_json::array();
  for (const auto& d : derived) der.push_back({{"name", d.name}, {"value", d.value}, {"error", d.error}});
  doc["derived"] = der;
  return doc.dump(2);
}

namespace {

FitResult make_result(std::vector<std::string> names, const LmResult& lm, Eigen::Index residual_count) {
  FitResult fr;
  fr.names = std::move(names);
  fr.values.assign(lm.params.data(), lm.params.data() + lm.params.size());
  fr.covariance = lm.covariance;
  for (Eigen::Index k = 0; k < lm.params.size(); ++k) fr.errors.push_back(std::sqrt(std::max(lm.covariance(k, k), 0.0)));
  fr.chi2 = lm.chi2;
  fr.dof = static_cast<int>(residual_count - lm.params.size());
  fr.converged = lm.converged;
  fr.iterations = lm.iterations;
  return fr;
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) {
    const auto b = cell.find_first_not_of(" \t\r");
    const auto e = cell.find_last_not_of(" \t\r");
    out.push_back(b == std::string::npos ? std::string{} : cell.substr(b, e - b + 1));
  }
  return out;
}

}  // namespace

void PowerSweepDataset::validate() const {
  for (const auto& r : rows) {
    if (!(r.pump_power_mw > 0.0)) throw DomainError("pump powers must be positive");
    if (!(r.w_s_err > 0.0) || !(r.w_i_err > 0.0) || !(r.w_2_err > 0.0) || !(r.g2_err > 0.0))
      throw DomainError("standard errors must be positive");
  }
}

PowerSweepDataset PowerSweepDataset::parse_csv(const std::string& text) {
  static const char* kColumns[] = {"power_mW", "W_s", "W_s_err", "W_i", "W_i_err", "W_2", "W_2_err", "g2", "g2_err"};
  std::istringstream in(text);
  std::string line;
  std::map<std::string, std::size_t> index;
  int line_no = 0;
  PowerSweepDataset data;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos || line[0] == '#') continue;
    const auto cells = split_csv_line(line);
    if (index.empty()) {
      for (std::size_t k = 0; k < cells.size(); ++k) index[cells[k]] = k;
      for (const char* c : kColumns)
        if (!index.count(c)) throw ConfigError(std::string("power sweep CSV lacks column '") + c + "'", line_no);
      continue;
    }
    double v[9];
    for (int c = 0; c < 9; ++c) {
      const std::size_t k = index[kColumns[c]];
      if (k >= cells.size()) throw ConfigError("short row in power sweep CSV", line_no);
      try {
        std::size_t used = 0;
        v[c] = std::stod(cells[k], &used);
        if (used != cells[k].size()) throw std::invalid_argument("trailing");
      } catch (const std::exception&) {
        throw ConfigError("not a number: '" + cells[k] + "'", line_no);
      }
    }
    data.rows.push_back({v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7], v[8]});
  }
  if (index.empty()) throw ConfigError("power sweep CSV is empty");
  data.validate();
  return data;
}

PowerSweepDataset PowerSweepDataset::load_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open dataset '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_csv(ss.str());
}

std::string PowerSweepDataset::to_csv() const {
  std::ostringstream out;
  out.precision(17);
  out << "power_mW,W_s,W_s_err,W_i,W_i_err,W_2,W_2_err,g2,g2_err\n";
  for (const auto& r : rows)
    out << r.pump_power_mw << ',' << r.w_s << ',' << r.w_s_err << ',' << r.w_i << ',' << r.w_i_err << ',' << r.w_2
        << ',' << r.w_2_err << ',' << r.g2 << ',' << r.g2_err << '\n';
  return out.str();
}

FitResult fit_characterization(const PowerSweepDataset& data, const CharacterizationFixed& fixed) {
  data.validate();
  if (!(fixed.gamma_s > 0.0) || !(fixed.gamma_i > 0.0)) throw DomainError("linewidths must be positive");
  if (!(fixed.p0 > 0.0 && fixed.p0 <= 1.0)) throw DomainError("p0 must lie in (0, 1]");
  std::set<double> powers;
  for (const auto& r : data.rows) powers.insert(r.pump_power_mw);
  if (powers.size() < 3) throw NumericalError("degenerate design: at least three distinct pump powers are needed");

  std::vector<PowerSweepRow> rows = data.rows;
  auto key = [](const PowerSweepRow& r) {
    return std::make_tuple(r.pump_power_mw, r.w_s, r.w_s_err, r.w_i, r.w_i_err, r.w_2, r.w_2_err, r.g2, r.g2_err);
  };
  std::sort(rows.begin(), rows.end(), [&](const auto& x, const auto& y) { return key(x) < key(y); });

  FilterSpec fs, fi;
  fs.gamma = fixed.gamma_s;
  fi.gamma = fixed.gamma_i;
  fs.mode_populations = {fixed.p0};
  if (fixed.p0 < 1.0) fs.mode_populations.push_back(1.0 - fixed.p0);
  DetectorSpec ds, di;
  ds.dark_rate = fixed.dark_s;
  di.dark_rate = fixed.dark_i;
  ds.jitter_sigma = fixed.sigma;

  const ResidualFunction residuals = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(4 * static_cast<Eigen::Index>(rows.size()));
    SourceOperatingPoint op;
    op.brightness = p[0] * 1e-6;
    DetectorSpec s = ds, i = di;
    s.efficiency = p[1];
    i.efficiency = p[2];
    Eigen::Index k = 0;
    for (const auto& row : rows) {
      op.pump_power_mw = row.pump_power_mw;
      const Fluxes w = fluxes(op, fs, fi, s, i);
      double g2 = std::numeric_limits<double>::quiet_NaN();
      if (w.signal > 0.0 && w.idler > 0.0) g2 = g2_cross(op, fs, fi, s, i, 0.0);
      r[k++] = (row.w_s - w.signal) / row.w_s_err;
      r[k++] = (row.w_i - w.idler) / row.w_i_err;
      r[k++] = (row.w_2 - w.pair) / row.w_2_err;
      r[k++] = (row.g2 - g2) / row.g2_err;
    }
    return r;
  };

  // Starting point from the highest-power row: a = eta_i x, b = eta_s x,
  // c = eta_s eta_i x with x = R/B.
  const PowerSweepRow& top = rows.back();
  const double geff = fixed.gamma_s * fixed.gamma_i / (fixed.gamma_s + fixed.gamma_i);
  const double a = 4.0 * (top.w_i - fixed.dark_i) / fixed.gamma_i;
  const double b = 4.0 * fixed.p0 * (top.w_s - fixed.dark_s) / fixed.gamma_s;
  const double c = 4.0 * top.w_2 / geff;
  if (!(a > 0.0 && b > 0.0 && c > 0.0))
    throw NumericalError("cannot form a starting point: rates at the highest power do not exceed the dark counts");
  const double x = a * b / c;
  Eigen::VectorXd start(3);
  start << x * kTwoPi / top.pump_power_mw * 1e6, b / x, a / x;

  const LmResult lm = levenberg_marquardt(residuals, start);
  return make_result({"brightness_per_s_MHz", "eta_s", "eta_i"}, lm, 4 * static_cast<Eigen::Index>(rows.size()));
}

namespace {

struct BinData {
  std::vector<double> center_s;
  std::vector<double> g2;
  std::vector<double> error;
  double width_s = 0.0;
};

BinData histogram_points(const CorrelationHistogram& h) {
  const auto points = g2_estimate(h);
  BinData d;
  d.width_s = h.bin_width_ps * 1e-12;
  const double norm = h.rate_a * h.rate_b * h.duration_s * d.width_s;
  for (const auto& p : points) {
    d.center_s.push_back(p.tau_ps * 1e-12);
    d.g2.push_back(p.g2);
    d.error.push_back(p.error > 0.0 ? p.error : 1.0 / norm);
  }
  return d;
}

double peak_center(const BinData& d, double* peak_value) {
  const auto it = std::max_element(d.g2.begin(), d.g2.end());
  *peak_value = *it;
  return d.center_s[static_cast<std::size_t>(it - d.g2.begin())];
}

}  // namespace

FitResult fit_lineshape(const CorrelationHistogram& h, LineshapeModel model, const LineshapeFixed& fixed) {
  if (!(fixed.gamma_s > 0.0) || (model == LineshapeModel::kCross && !(fixed.gamma_i > 0.0)))
    throw DomainError("linewidths must be positive");
  if (!(fixed.sigma >= 0.0)) throw DomainError("jitter must be non-negative");
  const double slowest =
      model == LineshapeModel::kCross ? std::min(fixed.gamma_s, fixed.gamma_i) : fixed.gamma_s;
  if (h.range_ps * 1e-12 < 5.0 / slowest)
    throw DomainError("histogram range must cover at least five decay constants on each side");

  const BinData d = histogram_points(h);
  const auto n = static_cast<Eigen::Index>(d.g2.size());
  double peak = 0.0;
  const double offset0_ps = peak_center(d, &peak) * 1e12;
  if (!(peak > 1.0)) throw NumericalError("histogram shows no correlation peak to fit");

  if (model == LineshapeModel::kCross) {
    const double gs = fixed.gamma_s, gi = fixed.gamma_i, sigma = fixed.sigma;
    const double geff = gs * gi / (gs + gi);
    const double amplitude_at_unit_rb = 4.0 * geff * geff / (gs * gi);
    const ResidualFunction residuals = [&](const Eigen::VectorXd& p) {
      Eigen::VectorXd r(n);
      const double offset = p[1] * 1e-12;
      for (Eigen::Index k = 0; k < n; ++k) {
        const double c = d.center_s[k] - offset;
        const double shape = bin_average([&](double t) { return jitter_factor(gs, gi, sigma, t); },
                                         c - 0.5 * d.width_s, c + 0.5 * d.width_s, 2);
        r[k] = (d.g2[k] - (1.0 + amplitude_at_unit_rb * shape / p[0])) / d.error[k];
      }
      return r;
    };
    Eigen::VectorXd start(2);
    start << amplitude_at_unit_rb * jitter_factor(gs, gi, sigma, 0.0) / (peak - 1.0), offset0_ps;
    LmOptions opt;
    opt.scale = Eigen::Vector2d(std::abs(start[0]), 1.0 / gi * 1e12);
    const LmResult lm = levenberg_marquardt(residuals, start, opt);
    return make_result({"r_over_b", "offset_ps"}, lm, n);
  }

  const double g = fixed.gamma_s;
  const ResidualFunction residuals = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(n);
    const double sigma = std::abs(p[1]) * 1e-12;
    const double offset = p[2] * 1e-12;
    for (Eigen::Index k = 0; k < n; ++k) {
      const double c = d.center_s[k] - offset;
      const double shape = bin_average([&](double t) { return jitter_factor(g, g, sigma, t); },
                                       c - 0.5 * d.width_s, c + 0.5 * d.width_s, 2);
      r[k] = (d.g2[k] - (1.0 + shape / p[0])) / d.error[k];
    }
    return r;
  };
  const double sigma0_ps = fixed.sigma > 0.0 ? fixed.sigma * 1e12 : 0.5e12 / g;
  const double k0 = jitter_factor(g, g, sigma0_ps * 1e-12, 0.0) / (peak - 1.0);
  const double perturb[5][2] = {{1.0, 1.0}, {1.3, 0.5}, {0.8, 1.5}, {1.0, 2.0}, {1.6, 0.25}};

  std::optional<LmResult> best;
  for (const auto& pert : perturb) {
    Eigen::VectorXd start(3);
    start << k0 * pert[0], sigma0_ps * pert[1], offset0_ps;
    LmOptions opt;
    opt.scale = Eigen::Vector3d(std::abs(k0), sigma0_ps, 1.0 / g * 1e12);
    opt.allow_singular = true;
    LmResult lm;
    try {
      lm = levenberg_marquardt(residuals, start, opt);
    } catch (const NumericalError&) {
      continue;
    }
    const bool better = !best || lm.chi2 < best->chi2 ||
                        (lm.chi2 == best->chi2 && lm.params[0] < best->params[0]);
    if (better) best = lm;
  }
  if (!best) throw NumericalError("auto-correlation fit failed from every starting point");
  best->params[1] = std::abs(best->params[1]);
  // Recompute the covariance strictly at the selected optimum.
  const Eigen::MatrixXd j = [&] {
    Eigen::MatrixXd m(n, 3);
    const Eigen::Vector3d scale(std::abs(k0), sigma0_ps, 1.0 / g * 1e12);
    for (int c = 0; c < 3; ++c) {
      const double step = 1e-6 * std::max(std::abs(best->params[c]), scale[c]);
      Eigen::VectorXd up = best->params, down = best->params;
      up[c] += step;
      down[c] -= step;
      m.col(c) = (residuals(up) - residuals(down)) / (up[c] - down[c]);
    }
    return m;
  }();
  best->covariance = invert_normal_matrix(j.transpose() * j, false);
  return make_result({"K", "sigma_ps", "offset_ps"}, *best, n);
}

FitResult fit_fringe(const FringeData& data) {
  const std::size_t m = data.theta.size();
  const std::size_t combos = data.counts.size();
  if (combos == 0) throw DomainError("fringe fit needs at least one detector combination");
  for (const auto& c : data.counts)
    if (c.size() != m) throw DomainError("every combination needs one count per analyzer angle");
  std::set<double> distinct(data.theta.begin(), data.theta.end());
  if (distinct.size() < 5) throw DomainError("fringe fit needs at least five distinct analyzer angles");
  if (*distinct.rbegin() - *distinct.begin() < kPi / 2.0 - 1e-9)
    throw DomainError("insufficient span: analyzer angles must cover at least one fringe period (pi/2)");

  // Per-combination linear fits offset + A sin 4t + B cos 4t give the start.
  Eigen::MatrixXd design(static_cast<Eigen::Index>(m), 3);
  for (std::size_t t = 0; t < m; ++t)
    design.row(static_cast<Eigen::Index>(t)) << 1.0, std::sin(4.0 * data.theta[t]), std::cos(4.0 * data.theta[t]);
  std::vector<Eigen::Vector3d> linear;
  std::size_t strongest = 0;
  for (std::size_t c = 0; c < combos; ++c) {
    Eigen::VectorXd y(static_cast<Eigen::Index>(m));
    for (std::size_t t = 0; t < m; ++t) y[static_cast<Eigen::Index>(t)] = data.counts[c][t];
    linear.push_back(design.colPivHouseholderQr().solve(y));
    if (std::hypot(linear[c][1], linear[c][2]) > std::hypot(linear[strongest][1], linear[strongest][2]))
      strongest = c;
  }
  const double phase0 = std::atan2(linear[strongest][2], linear[strongest][1]);
  const auto np = static_cast<Eigen::Index>(1 + 2 * combos);
  Eigen::VectorXd start(np);
  Eigen::VectorXd scale(np);
  start[0] = phase0;
  scale[0] = 1.0;
  for (std::size_t c = 0; c < combos; ++c) {
    const auto ci = static_cast<Eigen::Index>(c);
    start[1 + ci] = linear[c][1] * std::cos(phase0) + linear[c][2] * std::sin(phase0);
    start[1 + static_cast<Eigen::Index>(combos) + ci] = linear[c][0];
    const double level = std::max(std::abs(linear[c][0]), 1.0);
    scale[1 + ci] = level;
    scale[1 + static_cast<Eigen::Index>(combos) + ci] = level;
  }

  const ResidualFunction residuals = [&](const Eigen::VectorXd& p) {
    Eigen::VectorXd r(static_cast<Eigen::Index>(m * combos));
    Eigen::Index k = 0;
    for (std::size_t c = 0; c < combos; ++c) {
      const double amp = p[1 + static_cast<Eigen::Index>(c)];
      const double off = p[1 + static_cast<Eigen::Index>(combos + c)];
      for (std::size_t t = 0; t < m; ++t) {
        const double y = data.counts[c][t];
        r[k++] = (y - (off + amp * std::sin(4.0 * data.theta[t] + p[0]))) / std::sqrt(std::max(y, 1.0));
      }
    }
    return r;
  };
  LmOptions opt;
  opt.scale = scale;
  opt.allow_singular = true;
  const LmResult lm = levenberg_marquardt(residuals, start, opt);

  std::vector<std::string> names{"phase"};
  for (std::size_t c = 0; c < combos; ++c) names.push_back("amplitude_" + std::to_string(c));
  for (std::size_t c = 0; c < combos; ++c) names.push_back("offset_" + std::to_string(c));
  FitResult fr = make_result(names, lm, static_cast<Eigen::Index>(m * combos));

  Eigen::VectorXd mean_grad = Eigen::VectorXd::Zero(np);
  double mean = 0.0;
  for (std::size_t c = 0; c < combos; ++c) {
    const auto ia = 1 + static_cast<Eigen::Index>(c);
    const auto io = 1 + static_cast<Eigen::Index>(combos + c);
    const double amp = lm.params[ia], off = lm.params[io];
    Eigen::VectorXd grad = Eigen::VectorXd::Zero(np);
    grad[ia] = (amp < 0.0 ? -1.0 : 1.0) / off;
    grad[io] = -std::abs(amp) / (off * off);
    const double v = std::abs(amp) / off;
    const double err = std::sqrt(std::max(grad.dot(lm.covariance * grad), 0.0));
    fr.derived.push_back({"visibility_" + std::to_string(c), v, err});
    mean += v / static_cast<double>(combos);
    mean_grad += grad / static_cast<double>(combos);
  }
  fr.derived.push_back({"visibility", mean, std::sqrt(std::max(mean_grad.dot(lm.covariance * mean_grad), 0.0))});
  return fr;
}

}  // namespace spdc
