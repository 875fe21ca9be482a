#include "resbg/scales.hpp"

#include "resbg/error.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>

namespace resbg {

namespace {

void require_valid(const ResonanceSpec& spec) {
  if (spec.channel_amplitudes.empty()) {
    throw InvalidSpec("resonance spec has no channels");
  }
  if (!(spec.escape_width() > 0.0)) {
    throw InvalidSpec("escape width Γ0 = Σ A_c² must be positive (all amplitudes are zero)");
  }
  if (spec.gamma_spread < 0.0 || spec.gamma_abs < 0.0) {
    throw InvalidSpec("widths Γ↓ and Γ_abs must be nonnegative");
  }
}

ComplexMatrix resonant_matrix(double energy, const ResonanceSpec& spec, double damping) {
  const auto m = static_cast<Eigen::Index>(spec.channel_amplitudes.size());
  const std::complex<double> denom(energy - spec.epsilon0, damping / 2.0);
  ComplexMatrix s = ComplexMatrix::Identity(m, m);
  for (Eigen::Index a = 0; a < m; ++a) {
    for (Eigen::Index b = 0; b < m; ++b) {
      const double aa = spec.channel_amplitudes[static_cast<std::size_t>(a)];
      const double ab = spec.channel_amplitudes[static_cast<std::size_t>(b)];
      s(a, b) -= std::complex<double>(0.0, aa * ab) / denom;
    }
  }
  return s;
}

}  // namespace

double ResonanceSpec::escape_width() const {
  double sum = 0.0;
  for (double a : channel_amplitudes) sum += a * a;
  return sum;
}

double ResonanceSpec::eta() const { return gamma_spread / escape_width(); }

double ResonanceSpec::gamma() const { return 2.0 * kPi * gamma_abs / level_spacing; }

ControlParams ControlParams::perfect(double eta, double gamma) {
  return ControlParams{eta, gamma, 1.0, 0.0, kPi / 4};
}

ControlParams ControlParams::from_t0(double eta, double gamma, double t0, int r0_sign) {
  if (!(t0 >= 0.0 && t0 <= 1.0)) {
    throw DomainError("t0 must lie in [0, 1], got " + std::to_string(t0));
  }
  double r0 = std::sqrt(std::max(0.0, 1.0 - t0 * t0));
  if (r0_sign < 0) r0 = -r0;
  ControlParams p{eta, gamma, t0, r0, 0.5 * std::acos(r0)};
  if (t0 == 1.0) p.r0 = 0.0;
  return p;
}

ControlParams ControlParams::from_phi(double eta, double gamma, double phi) {
  if (!(phi >= 0.0 && phi <= kPi / 2)) {
    throw DomainError("mixing angle φ must lie in [0, π/2]");
  }
  double t0 = std::sin(2.0 * phi);
  double r0 = std::cos(2.0 * phi);
  // Snap the exact perfect-coupling point so downstream branches see r0 == 0.
  if (std::abs(r0) < 1e-15) {
    r0 = 0.0;
    t0 = 1.0;
  }
  return ControlParams{eta, gamma, t0, r0, phi};
}

ControlParams ControlParams::swapped() const {
  ControlParams p = *this;
  p.r0 = -r0;
  p.phi = 0.5 * std::acos(p.r0);
  return p;
}

ComplexMatrix breit_wigner_s0(double energy, const ResonanceSpec& spec) {
  require_valid(spec);
  return resonant_matrix(energy, spec, spec.escape_width());
}

ComplexMatrix optical_s(double energy, const ResonanceSpec& spec) {
  require_valid(spec);
  return resonant_matrix(energy, spec, spec.escape_width() + spec.gamma_spread);
}

ControlParams control_params(const ResonanceSpec& spec) {
  require_valid(spec);
  if (!(spec.level_spacing > 0.0)) {
    throw InvalidSpec("level spacing Δ must be positive");
  }
  const double eta = spec.eta();
  const double gamma = spec.gamma();
  if (spec.channel_amplitudes.size() != 2) {
    throw UnsupportedConfiguration(
        "the (t0, r0) reduction needs exactly two channels, got " +
            std::to_string(spec.channel_amplitudes.size()),
        eta, gamma);
  }
  const double g0 = spec.escape_width();
  const double a1 = spec.channel_amplitudes[0];
  const double a2 = spec.channel_amplitudes[1];
  ControlParams p;
  p.eta = eta;
  p.gamma = gamma;
  p.r0 = (a2 * a2 - a1 * a1) / g0;
  p.t0 = 2.0 * std::abs(a1 * a2) / g0;
  p.phi = 0.5 * std::acos(std::clamp(p.r0, -1.0, 1.0));
  return p;
}

}  // namespace resbg
