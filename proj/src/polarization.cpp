#include "spdc/polarization.hpp"

#include <algorithm>
#include <cmath>

#include "json.hpp"
#include "spdc/errors.hpp"
#include "spdc/units.hpp"

namespace spdc {

TwoQubitState::TwoQubitState(const Matrix4c& rho) : rho_(rho) {
  if (!rho.allFinite()) throw DomainError("density matrix has non-finite entries");
  if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > 1e-12) throw DomainError("density matrix is not Hermitian");
  if (std::abs(rho.trace() - Complex(1.0, 0.0)) > 1e-12) throw DomainError("density matrix trace is not 1");
  Eigen::SelfAdjointEigenSolver<Matrix4c> eig(0.5 * (rho + rho.adjoint()));
  if (eig.eigenvalues().minCoeff() < -1e-10) throw DomainError("density matrix is not positive semidefinite");
}

double TwoQubitState::fidelity(const Eigen::Vector4cd& psi) const {
  const Eigen::Vector4cd u = psi.normalized();
  return (u.adjoint() * rho_ * u)(0, 0).real();
}

std::string TwoQubitState::to_json() const {
  nlohmann::ordered_json doc;
  doc["basis"] = {"HH", "HV", "VH", "VV"};
  auto entries = nlohmann::ordered_json::array();
  for (int r = 0; r < 4; ++r)
    for (int c = 0; c < 4; ++c) entries.push_back({rho_(r, c).real(), rho_(r, c).imag()});
  doc["rho"] = entries;
  return doc.dump(2);
}

TwoQubitState pair_state(double mag_alpha, double mag_beta, double phi, double visibility) {
  if (!(mag_alpha >= 0.0) || !(mag_beta >= 0.0) || !(mag_alpha + mag_beta > 0.0))
    throw DomainError("pair amplitudes must be non-negative and not both zero");
  if (!(visibility >= 0.0 && visibility <= 1.0)) throw DomainError("visibility must lie in [0, 1]");
  const double norm = std::hypot(mag_alpha, mag_beta);
  const double a = mag_alpha / norm, b = mag_beta / norm;
  Eigen::Vector4cd psi = Eigen::Vector4cd::Zero();
  psi[0] = a;
  psi[3] = b * std::polar(1.0, phi);
  Matrix4c rho = visibility * psi * psi.adjoint();
  rho(0, 0) += (1.0 - visibility) * a * a;
  rho(3, 3) += (1.0 - visibility) * b * b;
  return TwoQubitState(rho);
}

Matrix2c waveplate_unitary(PlateKind kind, double angle) {
  if (!std::isfinite(angle)) throw DomainError("waveplate angle must be finite");
  const double delta = kind == PlateKind::kHalf ? kPi : kPi / 2.0;
  const double c = std::cos(angle), s = std::sin(angle);
  Matrix2c rot, rot_back, retard;
  rot << c, s, -s, c;
  rot_back << c, -s, s, c;
  retard << 1.0, 0.0, 0.0, std::polar(1.0, delta);
  return rot_back * retard * rot;
}

void AnalyzerSetting::validate() const {
  if (plates.size() > 2) throw DomainError("an analyzer holds at most two waveplates");
  for (const auto& p : plates)
    if (!std::isfinite(p.angle)) throw DomainError("waveplate angle must be finite");
}

Matrix2c AnalyzerSetting::unitary() const {
  validate();
  Matrix2c u = Matrix2c::Identity();
  for (const auto& p : plates) u = waveplate_unitary(p.kind, p.angle) * u;
  return u;
}

Matrix2c AnalyzerSetting::projector(Port p) const {
  const Matrix2c u = unitary();
  Matrix2c port = Matrix2c::Zero();
  if (p == Port::kTransmit)
    port(0, 0) = 1.0;
  else
    port(1, 1) = 1.0;
  return u.adjoint() * port * u;
}

AnalyzerSetting signal_analyzer(double theta) {
  return AnalyzerSetting{{{PlateKind::kQuarter, kPi / 4.0}, {PlateKind::kHalf, theta}}, Port::kTransmit};
}

AnalyzerSetting diagonal_analyzer() { return AnalyzerSetting{{{PlateKind::kHalf, kPi / 8.0}}, Port::kTransmit}; }

namespace {

Matrix4c kron(const Matrix2c& a, const Matrix2c& b) {
  Matrix4c out;
  for (int i = 0; i < 2; ++i)
    for (int j = 0; j < 2; ++j) out.block<2, 2>(2 * i, 2 * j) = a(i, j) * b;
  return out;
}

}  // namespace

std::array<double, 4> coincidence_probabilities(const TwoQubitState& state, const AnalyzerSetting& signal,
                                                const AnalyzerSetting& idler) {
  const Matrix2c ps[2] = {signal.projector(Port::kTransmit), signal.projector(Port::kReflect)};
  const Matrix2c pi[2] = {idler.projector(Port::kTransmit), idler.projector(Port::kReflect)};
  std::array<double, 4> out{};
  for (int s = 0; s < 2; ++s)
    for (int i = 0; i < 2; ++i)
      out[2 * s + i] = std::clamp((state.rho() * kron(ps[s], pi[i])).trace().real(), 0.0, 1.0);
  return out;
}

double analyzer_correlation(const TwoQubitState& state, const AnalyzerSetting& signal, const AnalyzerSetting& idler) {
  const auto p = coincidence_probabilities(state, signal, idler);
  return p[0] + p[3] - p[1] - p[2];
}

std::vector<double> FringeCurve::combination(std::size_t c) const {
  if (c >= 4) throw DomainError("combination index must be below 4");
  std::vector<double> out;
  out.reserve(probabilities.size());
  for (const auto& p : probabilities) out.push_back(p[c]);
  return out;
}

FringeCurve fringe_curve(const TwoQubitState& state, const std::vector<double>& theta) {
  FringeCurve curve;
  curve.theta = theta;
  const AnalyzerSetting idler = diagonal_analyzer();
  for (double t : theta) curve.probabilities.push_back(coincidence_probabilities(state, signal_analyzer(t), idler));
  return curve;
}

double visibility(const std::vector<double>& series) {
  if (series.empty()) throw DomainError("visibility of an empty series");
  const auto [lo, hi] = std::minmax_element(series.begin(), series.end());
  if (*hi + *lo <= 0.0) return 0.0;
  return (*hi - *lo) / (*hi + *lo);
}

double visibility(const FringeCurve& curve) {
  double sum = 0.0;
  for (std::size_t c = 0; c < 4; ++c) sum += visibility(curve.combination(c));
  return sum / 4.0;
}

Correlator chsh_correlator(double n11, double n12, double n21, double n22) {
  if (n11 < 0.0 || n12 < 0.0 || n21 < 0.0 || n22 < 0.0) throw DomainError("coincidence counts must be non-negative");
  const double total = n11 + n12 + n21 + n22;
  if (!(total > 0.0)) throw DomainError("correlator needs a positive total count");
  const double e = (n11 + n22 - n12 - n21) / total;
  return {e, std::sqrt(std::max(1.0 - e * e, 0.0) / total)};
}

Correlator chsh_parameter(const Correlator& e11, const Correlator& e12, const Correlator& e21,
                          const Correlator& e22) {
  return {std::abs(e11.value + e12.value + e21.value - e22.value),
          std::sqrt(e11.error * e11.error + e12.error * e12.error + e21.error * e21.error + e22.error * e22.error)};
}

ChshSettings optimal_settings(double phi) {
  ChshSettings s;
  s.theta_plus = phi + kPi / 4.0;
  s.theta_minus = phi - kPi / 4.0;
  // The signal chain measures cos(a) sx + sin(a) sy with a = pi/2 - 4 theta.
  s.signal_y1 = signal_analyzer((kPi / 2.0 - s.theta_plus) / 4.0);
  s.signal_y2 = signal_analyzer((kPi / 2.0 - s.theta_minus) / 4.0);
  s.idler_x1 = signal_analyzer(kPi / 8.0);
  s.idler_x2 = signal_analyzer(kPi / 4.0);
  return s;
}

double chsh_value(const TwoQubitState& state, const ChshSettings& s) {
  const double e11 = analyzer_correlation(state, s.signal_y1, s.idler_x1);
  const double e12 = analyzer_correlation(state, s.signal_y2, s.idler_x1);
  const double e21 = analyzer_correlation(state, s.signal_y1, s.idler_x2);
  const double e22 = analyzer_correlation(state, s.signal_y2, s.idler_x2);
  return std::abs(e11 + e12 + e21 - e22);
}

}  // namespace spdc
