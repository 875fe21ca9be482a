#pragma once

#include "resbg/p0.hpp"
#include "resbg/scales.hpp"

namespace resbg::analytic {

// Every density below is zero outside its support and nonnegative inside.
// Exact representations take a P0Model; "asymptotic" closed forms take γ.

struct GaussianLimitParams {
  double mean_t = 0.0;        // 1/(1+η)
  double sigma2_T = 0.0;      // 4η²/(γ(1+η)⁴), variance of √T and of t_r, t_i
  double sigma2_theta = 0.0;  // 4η²/(γ(1+η)²)
};

/// Gaussian limit of (√T, θ) at γ ≫ 1. Throws DomainError for γ ≤ 0.
GaussianLimitParams gaussian_limit_params(double eta, double gamma);

// -- P0 arguments -----------------------------------------------------------

/// x for the joint (R, T) law at general r0; reduces to (R/η + ηT)/(1−R−T)
/// at r0 = 0.
double x_rt(double R, double T, double eta, double r0 = 0.0);
/// x_η(T, θ) = (T(1+η²) − 2√T cosθ + 1)/(2η√T(cosθ − √T)).
double x_ttheta(double T, double theta, double eta);
/// x(p, θ) = ((1+p)² sec²θ − 2p + η² − 1)/(2ηp).
double x_phase(double p, double theta, double eta);

// -- intensities ------------------------------------------------------------

/// Joint density of (R, T) at perfect coupling:
/// 2/(π(1−R−T)²√y)·P0(x_rt), y = 1 + 2RT − (1−R)² − (1−T)².
double joint_rt_pdf(double R, double T, double eta, const P0Model& p0);

/// Transmission density at perfect coupling, as a single integral over R
/// between (1−√T)² and 1 − T. Evaluated in the variable w = 1/(1−R−T)
/// followed by w = w_min + τ², which removes both endpoint singularities.
double transmission_pdf(double T, double eta, const P0Model& p0);

/// The same marginal obtained by integrating joint_rt_pdf over R directly.
/// Independent numerical route used for consistency checks.
double transmission_pdf_from_joint_rt(double T, double eta, const P0Model& p0);

/// Zero absorption: 1/(π√(T(1−T)))·1/(ηT + (1−T)/η).
double transmission_pdf_zero_absorption(double T, double eta);

/// Strong-absorption closed form, peaked near T = 1/(1+η)².
double strong_absorption_transmission_pdf(double T, double eta, double gamma);

/// Density of R = R₊ at direct reflection r0 (use −r0 for R₋). Throws
/// DomainError for |r0| ≥ 1. Vanishes identically for R ≤ r0² when r0 > 0.
double reflection_pdf(double R, double eta, double r0, const P0Model& p0);

// -- phases -----------------------------------------------------------------

/// Zero absorption: 1/(π(η cos²θ + η⁻¹ sin²θ)) on (−π/2, π/2).
double phase_pdf_zero_absorption(double theta, double eta);

/// Joint density of (T, θ) at t0 = 1, nonzero for 0 ≤ T ≤ cos²θ.
double joint_ttheta_pdf(double T, double theta, double eta, const P0Model& p0);

/// ∫ joint_ttheta_pdf dθ; should reproduce transmission_pdf.
double transmission_pdf_from_joint_ttheta(double T, double eta, const P0Model& p0);

/// Strong-absorption asymptotic of the joint (T, θ) density; keeps the
/// support cosθ > √T.
double joint_ttheta_asymptotic(double T, double theta, double eta, double gamma);

/// Rician approximation (Gaussian t_r − ⟨t⟩, t_i with variance σ²_T);
/// positive on the whole (T, θ) plane.
double joint_ttheta_rician(double T, double theta, double eta, double gamma);

/// Transmission phase density sec²θ/(2π) ∫₀^∞ dp (1+p)/p² P0(x(p, θ)),
/// integrated in s = ln p over the window where P0 is non-negligible.
double phase_pdf(double theta, double eta, const P0Model& p0);

/// Weak-absorption form P_{γ=0}(θ)[erfc(√μ) + 2√(μ/π)e^{−μ}],
/// μ = (γ/4η)(sec²θ − 1 + η).
double phase_pdf_weak(double theta, double eta, double gamma);

/// Strong-absorption form (γ sec²θ/4π)[K₀(ξ) + (γ sec²θ/(4ηξ))K₁(ξ)]e^{−ν}.
/// This is the phase density for P0 = p0_strong in closed form.
double phase_pdf_strong(double theta, double eta, double gamma);

// -- phase rigidity ---------------------------------------------------------

/// Which phase law feeds the phase-rigidity transform.
class PhaseModel {
 public:
  static PhaseModel exact(const P0Model& p0) { return PhaseModel(&p0); }
  static PhaseModel zero_absorption() { return PhaseModel(nullptr); }
  const P0Model* p0() const { return p0_; }

 private:
  explicit PhaseModel(const P0Model* p0) : p0_(p0) {}
  const P0Model* p0_;
};

/// Density of ρ = cos 2θ: P(θ)/√(1−ρ²) at sec²θ = 2/(1+ρ) (both θ branches
/// folded by parity). Zero absorption uses the closed form
/// 2/(π√(1−ρ²)[η + η⁻¹ + (η − η⁻¹)ρ]).
double phase_rigidity_pdf(double rho, double eta, const PhaseModel& model);

}  // namespace resbg::analytic
