#pragma once

#include <Eigen/Dense>

#include <vector>

namespace resbg {

inline constexpr double kPi = 3.14159265358979323846;

using ComplexMatrix = Eigen::MatrixXcd;

/// Physical description of a resonance coupled to a chaotic background.
///
/// Only used as an ingestion front-end: all statistics work with the
/// dimensionless ControlParams obtained from control_params().
struct ResonanceSpec {
  double epsilon0 = 0.0;
  std::vector<double> channel_amplitudes;  // real A_c, time-reversal invariant
  double gamma_spread = 0.0;               // spreading width Γ↓
  double gamma_abs = 0.0;                  // uniform absorption width
  double level_spacing = 1.0;              // mean background spacing Δ

  /// Total escape width Γ0 = Σ A_c².
  double escape_width() const;
  /// η = Γ↓/Γ0.
  double eta() const;
  /// γ = 2πΓ_abs/Δ.
  double gamma() const;
};

/// Dimensionless control parameters at the resonance energy.
///
/// Invariants: t0 = sin 2φ ≥ 0, r0 = cos 2φ, t0² + r0² = 1.
struct ControlParams {
  double eta = 1.0;
  double gamma = 1.0;
  double t0 = 1.0;
  double r0 = 0.0;
  double phi = kPi / 4;

  /// Perfect coupling (t0 = 1, r0 = 0).
  static ControlParams perfect(double eta, double gamma);
  /// From the direct transmission amplitude; r0 takes the sign of r0_sign.
  static ControlParams from_t0(double eta, double gamma, double t0, int r0_sign = +1);
  /// From the channel-mixing angle φ ∈ [0, π/2].
  static ControlParams from_phi(double eta, double gamma, double phi);

  bool perfect_coupling() const { return r0 == 0.0; }
  /// Same parameters with the channel labels swapped (r0 -> -r0).
  ControlParams swapped() const;
};

/// S⁰_ab(E) = δ_ab − i A_a A_b / (E − ε0 + iΓ0/2).
ComplexMatrix breit_wigner_s0(double energy, const ResonanceSpec& spec);

/// Ensemble-averaged S matrix: Γ0 -> Γ0 + Γ↓ in the denominator.
ComplexMatrix optical_s(double energy, const ResonanceSpec& spec);

/// Reduces a two-channel spec to (η, γ, t0, r0, φ).
///
/// The sign of the off-diagonal element −2A₁A₂/Γ0 is absorbed into an
/// unobservable channel phase, so t0 = 2|A₁A₂|/Γ0 ≥ 0 always.
/// Throws UnsupportedConfiguration for M ≠ 2 (η and γ are carried by the
/// exception) and InvalidSpec for Γ0 = 0 or Δ ≤ 0.
ControlParams control_params(const ResonanceSpec& spec);

}  // namespace resbg
