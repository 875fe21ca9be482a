#pragma once

#include "resbg/rmt.hpp"
#include "resbg/scales.hpp"

#include <Eigen/Dense>

#include <complex>
#include <string>

namespace resbg {

using Complex = std::complex<double>;

/// Every observable of the two-channel S matrix at the resonance energy.
struct ScatteringPoint {
  Complex t;
  Complex r_plus;
  Complex r_minus;
  double T = 0.0;
  double R_plus = 0.0;
  double R_minus = 0.0;
  double theta_T = 0.0;        // (−π/2, π/2)
  double theta_R_plus = 0.0;   // (−π, π]
  double theta_R_minus = 0.0;  // (−π, π]
  double d = 0.0;              // unitarity deficit, [0, 1/2]
  double rho = 1.0;            // phase rigidity cos 2θ_T
  double q_sq = 0.0;           // (1−ρ)/(1+ρ)
  bool degenerate = false;     // t0 = 0: θ_T undefined, set to 0
};

/// S⁰ at resonance in the toolkit's sign convention, [[r0, t0], [t0, −r0]].
Eigen::Matrix2cd resonance_s0(const ControlParams& params);

/// S = 1 − (1 + iηK)⁻¹(1 − S⁰), K = u − iv.
Eigen::Matrix2cd full_s_matrix(const rmt::GreensSample& sample, const ControlParams& params);

/// Closed-form amplitudes t = t0/(1+ηv+iηu), r± = (ηv ± r0 + iηu)/(1+ηv+iηu)
/// and everything derived from them.
ScatteringPoint evaluate(const rmt::GreensSample& sample, const ControlParams& params);

/// 1 − S†S computed from the full matrix; equals (1 − S⁰)·d.
Eigen::Matrix2cd unitarity_deficit_matrix(const rmt::GreensSample& sample,
                                          const ControlParams& params);

/// d = 2ηv/((1+ηv)² + η²u²).
double unitarity_deficit(const rmt::GreensSample& sample, double eta);

struct BackgroundScattering {
  Complex s_bg;
  double R_bg = 1.0;
  double theta_bg = 0.0;
  // Amplitudes rebuilt from s_bg and the mixing angle φ.
  Complex t;
  Complex r_plus;
  Complex r_minus;
};

/// S_bg = (1 − iηK)/(1 + iηK) and the amplitudes it implies.
BackgroundScattering background_smatrix(const rmt::GreensSample& sample,
                                        const ControlParams& params);

struct MeanAmplitudes {
  double t = 0.0;
  double r_plus = 0.0;
  double r_minus = 0.0;
};

/// ⟨t⟩ = sin 2φ/(1+η), ⟨r±⟩ = (η ± cos 2φ)/(1+η); both real.
MeanAmplitudes mean_amplitudes(const ControlParams& params);

struct ZeroAbsorptionReport {
  bool passed = false;
  double intensity_residual = 0.0;  // max |T − t0²cos²θ_T|, |T − (1 − R±)|
  double phase_residual = 0.0;      // max distance of θ_R± from the prediction, mod π
  bool phase_checked = false;       // false when a reflected amplitude vanishes
  std::string detail;
};

/// Verifies T = t0²cos²θ_T = 1 − R± and θ_R± = π/2 + θ_T ± arctan(r0 cot θ_T).
/// The phase relation holds modulo π (it comes from a tangent), so phases
/// are compared modulo π. At θ_T = 0 the arctan term is its limit sign(r0)·π/2.
/// Throws InapplicableCheck for points with d > 0.
ZeroAbsorptionReport zero_absorption_check(const ScatteringPoint& point,
                                           const ControlParams& params, double tol = 1e-10);

}  // namespace resbg
