#pragma once

#include <Eigen/Dense>
#include <array>
#include <complex>
#include <string>
#include <vector>

namespace spdc {

using Complex = std::complex<double>;
using Matrix2c = Eigen::Matrix2cd;
using Matrix4c = Eigen::Matrix4cd;

/// Density matrix of a signal-idler polarization pair in the basis
/// {HH, HV, VH, VV}; the signal is the first qubit.
class TwoQubitState {
 public:
  /// Validates Hermiticity (1e-12), unit trace (1e-12) and positivity
  /// (smallest eigenvalue >= -1e-10).
  explicit TwoQubitState(const Matrix4c& rho);

  const Matrix4c& rho() const { return rho_; }
  /// Fidelity <psi|rho|psi> with a pure state (normalized internally).
  double fidelity(const Eigen::Vector4cd& psi) const;
  /// {"basis": [...], "rho": [[re, im] x 16]} with entries row-major.
  std::string to_json() const;

 private:
  Matrix4c rho_;
};

/// v |psi><psi| + (1 - v)(|a|^2 |HH><HH| + |b|^2 |VV><VV|) with
/// |psi> = a|HH> + b e^{i phi}|VV>; magnitudes are normalized internally.
TwoQubitState pair_state(double mag_alpha, double mag_beta, double phi, double visibility);

enum class PlateKind { kQuarter, kHalf };

/// Jones matrix of a retarder with fast axis at `angle` from H:
/// R(-angle) diag(1, e^{i delta}) R(angle), delta = pi/2 or pi.
Matrix2c waveplate_unitary(PlateKind kind, double angle);

struct Waveplate {
  PlateKind kind = PlateKind::kHalf;
  double angle = 0.0;
};

enum class Port { kTransmit = 0, kReflect = 1 };

/// Waveplates in the order the photon meets them, followed by a polarizing
/// beam splitter whose transmitted port passes H.
struct AnalyzerSetting {
  std::vector<Waveplate> plates;
  Port port = Port::kTransmit;

  void validate() const;
  Matrix2c unitary() const;
  Matrix2c projector(Port p) const;
};

/// Signal analyzer: quarter-wave plate at pi/4, then a half-wave plate at theta.
AnalyzerSetting signal_analyzer(double theta);
/// Idler analyzer in the diagonal basis: half-wave plate at pi/8.
AnalyzerSetting diagonal_analyzer();

/// Joint port probabilities indexed [2 * port_s + port_i]:
/// (T,T), (T,R), (R,T), (R,R).
std::array<double, 4> coincidence_probabilities(const TwoQubitState& state, const AnalyzerSetting& signal,
                                                const AnalyzerSetting& idler);

/// Correlation (+1 for equal ports, -1 otherwise) of two analyzers.
double analyzer_correlation(const TwoQubitState& state, const AnalyzerSetting& signal, const AnalyzerSetting& idler);

struct FringeCurve {
  std::vector<double> theta;
  std::vector<std::array<double, 4>> probabilities;  // per theta, per combination

  std::vector<double> combination(std::size_t c) const;
};

/// Expected coincidence probabilities versus signal analyzer angle theta with
/// the idler analyzed in the diagonal basis.
FringeCurve fringe_curve(const TwoQubitState& state, const std::vector<double>& theta);

/// (max - min) / (max + min) of one series.
double visibility(const std::vector<double>& series);
/// Mean visibility over the four combinations.
double visibility(const FringeCurve& curve);

struct Correlator {
  double value = 0.0;
  double error = 0.0;
};

/// E = (N11 + N22 - N12 - N21) / total with Poisson error sqrt((1 - E^2)/total).
Correlator chsh_correlator(double n11, double n12, double n21, double n22);

/// S = |E11 + E12 + E21 - E22| with errors added in quadrature.
/// Argument order: E(X1,Y1), E(X1,Y2), E(X2,Y1), E(X2,Y2).
Correlator chsh_parameter(const Correlator& e11, const Correlator& e12, const Correlator& e21,
                          const Correlator& e22);

/// Settings reaching 2 sqrt(2) v for (|HH> + e^{i phi}|VV>)/sqrt(2).
/// Signal observables cos t sx + sin t sy at t = theta_plus (Y1) and
/// theta_minus (Y2); the idler measures X1 = sx and X2 = sy in the frame
/// conjugated by the pair's phase convention.
struct ChshSettings {
  double theta_plus = 0.0;
  double theta_minus = 0.0;
  AnalyzerSetting signal_y1;
  AnalyzerSetting signal_y2;
  AnalyzerSetting idler_x1;
  AnalyzerSetting idler_x2;
};

ChshSettings optimal_settings(double phi);

/// CHSH value of `state` evaluated with the given settings.
double chsh_value(const TwoQubitState& state, const ChshSettings& s);

}  // namespace spdc
