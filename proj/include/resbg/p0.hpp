#pragma once

#include <json.hpp>

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace resbg {

enum class P0Kind { weak_asymptotic, strong_asymptotic, empirical };

std::string to_string(P0Kind kind);
P0Kind p0_kind_from_string(std::string_view name);

/// P0(x) ≈ (2/√π)(γ/4)^{3/2} √(x+1) e^{−γ(x+1)/4}, valid at γ ≪ 1.
double p0_weak(double x, double gamma);

/// P0(x) ≈ (γ/4) e^{−γ(x−1)/4}, valid at γ ≫ 1. Exactly normalized on [1, ∞).
double p0_strong(double x, double gamma);

/// Histogram + exponential-tail estimate of P0 built from x-samples.
struct EmpiricalP0 {
  // bin_edges[0] = 1; bin 0 is linear, bins 1.. are log-spaced in (x − 1)
  // and end at x_cut. densities are per-bin, already normalized.
  std::vector<double> bin_edges;
  std::vector<double> densities;
  double x_cut = 1.0;
  double s_tail = 0.0;
  double a_tail = 0.0;
  std::size_t n_calib = 0;
  std::uint64_t seed = 0;
  // Bin counts, kept for error bars; not serialized.
  std::vector<double> counts;
};

/// Density of x = (u² + v² + 1)/(2v) ≥ 1 in one of three forms.
///
/// Immutable once built; safe to share across threads. No model represents
/// γ = 0 (P0 collapses to δ(1/x) there), so every kind requires γ > 0.
class P0Model {
 public:
  static P0Model weak(double gamma);
  static P0Model strong(double gamma);
  static P0Model empirical(EmpiricalP0 payload, double gamma);

  P0Kind kind() const { return kind_; }
  double gamma() const { return gamma_; }
  const EmpiricalP0* empirical_payload() const {
    return kind_ == P0Kind::empirical ? &payload_ : nullptr;
  }

  /// Throws DomainError for x < 1.
  double density(double x) const;
  double operator()(double x) const { return density(x); }

  /// Maximum of the density over x ≥ 1.
  double peak() const;
  /// Abscissae where the density is not smooth (empirical interpolation
  /// nodes); empty for the analytic kinds.
  std::span<const double> knots() const { return node_x_; }
  /// Point beyond which the density stays below rel·peak().
  double upper_cutoff(double rel = 1e-16) const;
  /// ∫₁^∞ P0(x) dx of the represented density (analytic where possible).
  double normalization() const;

  nlohmann::json to_json() const;
  static P0Model from_json(const nlohmann::json& j);

 private:
  P0Model(P0Kind kind, double gamma) : kind_(kind), gamma_(gamma) {}
  void build_nodes();

  P0Kind kind_;
  double gamma_;
  EmpiricalP0 payload_;
  // Interpolation nodes derived from the payload.
  std::vector<double> node_x_;
  std::vector<double> node_y_;
};

inline constexpr std::size_t kMinCalibrationSamples = 10000;
inline constexpr int kEmpiricalLogBins = 200;

/// Builds the empirical model: 200 log-spaced bins in (x − 1) between the
/// 0.1th and 99th percentiles (plus one linear bin down to x = 1), linear
/// interpolation between bin centres, and an exponential tail a·e^{−s x}
/// beyond the 99th percentile, fitted by least squares on log-density over
/// the bins between the 90th and 99th percentiles. The tail is spliced onto
/// the interpolant at x_cut and the whole density renormalized to 1.
/// Throws CalibrationError below kMinCalibrationSamples samples.
P0Model p0_empirical_build(std::span<const double> x_samples, double gamma,
                           std::uint64_t seed = 0);

/// Dispatches on the model kind.
double p0_eval(const P0Model& model, double x);

}  // namespace resbg
