#include "resbg/observables.hpp"

#include "resbg/error.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace resbg {

namespace {

Complex green_k(const rmt::GreensSample& s) { return {s.u, -s.v}; }

// Distance between two angles on the circle of circumference `period`.
double angular_distance(double a, double b, double period) {
  double diff = std::fmod(a - b, period);
  if (diff < 0) diff += period;
  return std::min(diff, period - diff);
}

}  // namespace

Eigen::Matrix2cd resonance_s0(const ControlParams& p) {
  Eigen::Matrix2cd s0;
  s0 << p.r0, p.t0, p.t0, -p.r0;
  return s0;
}

Eigen::Matrix2cd full_s_matrix(const rmt::GreensSample& sample, const ControlParams& params) {
  const Complex denom = 1.0 + Complex(0.0, params.eta) * green_k(sample);
  const Eigen::Matrix2cd one = Eigen::Matrix2cd::Identity();
  return one - (one - resonance_s0(params)) / denom;
}

double unitarity_deficit(const rmt::GreensSample& s, double eta) {
  const double a = 1.0 + eta * s.v;
  const double b = eta * s.u;
  return 2.0 * eta * s.v / (a * a + b * b);
}

ScatteringPoint evaluate(const rmt::GreensSample& sample, const ControlParams& params) {
  const double eta = params.eta;
  const Complex denom(1.0 + eta * sample.v, eta * sample.u);
  ScatteringPoint p;
  p.t = params.t0 / denom;
  p.r_plus = Complex(eta * sample.v + params.r0, eta * sample.u) / denom;
  p.r_minus = Complex(eta * sample.v - params.r0, eta * sample.u) / denom;
  p.T = std::norm(p.t);
  p.R_plus = std::norm(p.r_plus);
  p.R_minus = std::norm(p.r_minus);
  p.degenerate = params.t0 == 0.0;
  // Re(denom) > 0 keeps θ_T inside (−π/2, π/2); take it from the denominator
  // so the phase survives t0 = 0.
  p.theta_T = p.degenerate ? 0.0 : -std::atan2(denom.imag(), denom.real());
  p.theta_R_plus = std::arg(p.r_plus);
  p.theta_R_minus = std::arg(p.r_minus);
  p.d = unitarity_deficit(sample, eta);
  const double tr = p.t.real();
  const double ti = p.t.imag();
  if (p.degenerate) {
    p.rho = 1.0;
  } else {
    p.rho = (tr * tr - ti * ti) / (tr * tr + ti * ti);
  }
  p.q_sq = (1.0 - p.rho) / (1.0 + p.rho);
  return p;
}

Eigen::Matrix2cd unitarity_deficit_matrix(const rmt::GreensSample& sample,
                                          const ControlParams& params) {
  const Eigen::Matrix2cd s = full_s_matrix(sample, params);
  return Eigen::Matrix2cd::Identity() - s.adjoint() * s;
}

BackgroundScattering background_smatrix(const rmt::GreensSample& sample,
                                        const ControlParams& params) {
  const Complex ik = Complex(0.0, params.eta) * green_k(sample);
  BackgroundScattering b;
  b.s_bg = (1.0 - ik) / (1.0 + ik);
  b.R_bg = std::norm(b.s_bg);
  b.theta_bg = std::arg(b.s_bg);
  const double sin2 = std::sin(2.0 * params.phi);
  const double cos2 = std::cos(2.0 * params.phi);
  b.t = 0.5 * sin2 * (1.0 + b.s_bg);
  b.r_plus = 0.5 * (1.0 - b.s_bg) + 0.5 * cos2 * (1.0 + b.s_bg);
  b.r_minus = 0.5 * (1.0 - b.s_bg) - 0.5 * cos2 * (1.0 + b.s_bg);
  return b;
}

MeanAmplitudes mean_amplitudes(const ControlParams& params) {
  if (!(params.eta >= 0.0)) throw DomainError("η must be nonnegative");
  const double scale = 1.0 / (1.0 + params.eta);
  return MeanAmplitudes{std::sin(2.0 * params.phi) * scale,
                        (params.eta + std::cos(2.0 * params.phi)) * scale,
                        (params.eta - std::cos(2.0 * params.phi)) * scale};
}

ZeroAbsorptionReport zero_absorption_check(const ScatteringPoint& point,
                                           const ControlParams& params, double tol) {
  if (point.d != 0.0) {
    throw InapplicableCheck("zero-absorption relations only apply to v = 0 points (d = " +
                            std::to_string(point.d) + ")");
  }
  ZeroAbsorptionReport report;
  const double c = std::cos(point.theta_T);
  const double flux = params.t0 * params.t0 * c * c;
  report.intensity_residual =
      std::max({std::abs(point.T - flux), std::abs(point.T - (1.0 - point.R_plus)),
                std::abs(point.T - (1.0 - point.R_minus))});

  double arctan_term = 0.0;
  if (point.theta_T == 0.0) {
    arctan_term = params.r0 > 0 ? kPi / 2 : (params.r0 < 0 ? -kPi / 2 : 0.0);
  } else {
    arctan_term = std::atan(params.r0 / std::tan(point.theta_T));
  }
  const double pred_plus = kPi / 2 + point.theta_T + arctan_term;
  const double pred_minus = kPi / 2 + point.theta_T - arctan_term;

  // A vanishing reflected amplitude has no phase.
  report.phase_checked = point.R_plus > 0.0 && point.R_minus > 0.0 &&
                         !point.degenerate;
  if (report.phase_checked) {
    report.phase_residual = std::max(angular_distance(point.theta_R_plus, pred_plus, kPi),
                                     angular_distance(point.theta_R_minus, pred_minus, kPi));
  }
  report.passed = report.intensity_residual <= tol && report.phase_residual <= tol;
  if (!report.passed) {
    std::ostringstream os;
    os << "intensity residual " << report.intensity_residual << ", phase residual "
       << report.phase_residual << " (tol " << tol << ")";
    report.detail = os.str();
  }
  return report;
}

}  // namespace resbg
