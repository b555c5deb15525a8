#pragma once

#include <Eigen/Dense>
#include <functional>
#include <string>
#include <vector>

#include "spdc/correlator.hpp"

namespace spdc {

inline constexpr const char* kModelVersion = "spdc-filtered-pair-model/1";

/// Whitened residuals r_k = (y_k - model_k(p)) / sigma_k.
using ResidualFunction = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;

struct LmOptions {
  int max_iterations = 200;
  double relative_step = 1e-8;
  /// Fall back to a pseudo-inverse for the covariance instead of throwing
  /// when the normal matrix is rank deficient.
  bool allow_singular = false;
  /// Typical magnitude of each parameter, used for finite-difference steps
  /// and the relative-step test. Defaults to |start| (or 1 where zero).
  Eigen::VectorXd scale;
};

struct LmResult {
  Eigen::VectorXd params;
  Eigen::MatrixXd covariance;
  double chi2 = 0.0;
  int iterations = 0;
  bool converged = false;
};

/// Damped Gauss-Newton (Levenberg-Marquardt with Marquardt diagonal scaling)
/// on a finite-difference Jacobian. Converged when the relative step drops
/// below `relative_step`. Covariance is (J^T J)^-1 at the solution.
LmResult levenberg_marquardt(const ResidualFunction& residuals, Eigen::VectorXd start, const LmOptions& options = {});

struct DerivedValue {
  std::string name;
  double value = 0.0;
  double error = 0.0;
};

struct FitResult {
  std::vector<std::string> names;
  std::vector<double> values;
  std::vector<double> errors;
  Eigen::MatrixXd covariance;
  std::vector<DerivedValue> derived;
  double chi2 = 0.0;
  int dof = 0;
  bool converged = false;
  int iterations = 0;
  std::string model = kModelVersion;

  double chi2_per_dof() const { return dof > 0 ? chi2 / dof : 0.0; }
  double value(const std::string& name) const;
  double error(const std::string& name) const;
  /// JSON document with names, values, errors, covariance, chi2/dof,
  /// convergence flag and model version.
  std::string to_json() const;
};

struct PowerSweepRow {
  double pump_power_mw = 0.0;
  double w_s = 0.0, w_s_err = 0.0;
  double w_i = 0.0, w_i_err = 0.0;
  double w_2 = 0.0, w_2_err = 0.0;
  double g2 = 0.0, g2_err = 0.0;
};

struct PowerSweepDataset {
  std::vector<PowerSweepRow> rows;

  void validate() const;
  /// CSV with header power_mW,W_s,W_s_err,W_i,W_i_err,W_2,W_2_err,g2,g2_err
  /// (any column order).
  static PowerSweepDataset load_csv(const std::string& path);
  static PowerSweepDataset parse_csv(const std::string& text);
  std::string to_csv() const;
};

/// Parameters held fixed in the characterization fit. Linewidths angular.
struct CharacterizationFixed {
  double gamma_s = 0.0;
  double gamma_i = 0.0;
  double dark_s = 0.0;
  double dark_i = 0.0;
  double p0 = 1.0;
  double sigma = 0.0;  // combined jitter
};

/// Simultaneous weighted fit of W_s, W_i, W_2 and g2_si(0) versus pump power.
/// Free parameters, in order: brightness (2 pi R/B at 1 mW, pairs/(s MHz)),
/// eta_s, eta_i. Needs at least three distinct powers.
FitResult fit_characterization(const PowerSweepDataset& data, const CharacterizationFixed& fixed);

enum class LineshapeModel { kCross, kAuto };

struct LineshapeFixed {
  double gamma_s = 0.0;  // auto mode uses gamma_s as the channel linewidth
  double gamma_i = 0.0;
  double sigma = 0.0;  // fixed in cross mode; starting value in auto mode
};

/// Cross mode fits {r_over_b, offset_ps}; auto mode fits {K, sigma_ps,
/// offset_ps}, taking the best of five perturbed starts (ties go to the
/// smaller K). The model is averaged over each histogram bin.
FitResult fit_lineshape(const CorrelationHistogram& h, LineshapeModel model, const LineshapeFixed& fixed);

/// Counts per analyzer angle for each detector combination; combinations
/// share the fringe phase, the period is fixed at pi/2 in theta.
struct FringeData {
  std::vector<double> theta;
  std::vector<std::vector<double>> counts;  // [combination][theta index]
};

/// Per-combination offset + amplitude * sin(4 theta + phase). Reports
/// visibility_<c> = |amplitude|/offset for each combination and their mean
/// `visibility` as derived values.
FitResult fit_fringe(const FringeData& data);

}  // namespace spdc
