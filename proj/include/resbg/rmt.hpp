#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace resbg::rmt {

using Rng = std::mt19937_64;

enum class Sampler { dense_goe, tridiagonal_beta1 };

std::string to_string(Sampler s);
/// Accepts "dense_goe"/"dense" and "tridiagonal_beta1"/"tridiagonal".
Sampler sampler_from_string(std::string_view name);

struct EnsembleConfig {
  int n_levels = 400;
  double gamma = 1.0;
  Sampler sampler = Sampler::tridiagonal_beta1;
  std::uint64_t seed = 0;
  std::size_t n_samples = 1;

  /// Throws DomainError unless N ≥ 16 and even, γ ≥ 0 and n_samples ≥ 1.
  void validate() const;
};

/// One draw of the local Green's function K = u − iv.
struct GreensSample {
  double u = 0.0;
  double v = 0.0;

  bool has_x() const { return v > 0.0; }
  /// x = (u² + v² + 1)/(2v) ≥ 1; throws DomainError when v = 0.
  double x() const;

  friend bool operator==(const GreensSample&, const GreensSample&) = default;
};

/// Symmetric tridiagonal matrix; off_diagonal[k] couples k and k+1.
struct TridiagonalMatrix {
  std::vector<double> diagonal;
  std::vector<double> off_diagonal;

  int size() const { return static_cast<int>(diagonal.size()); }
  Eigen::MatrixXd dense() const;
};

/// GOE with entry variance (1+δ_ij)/N: semicircle radius 2, Δ = π/N at 0.
Eigen::MatrixXd sample_goe(int n, Rng& rng);

/// β = 1 Dumitriu–Edelman tridiagonal model at the same scale: diagonal
/// N(0, 2/N), k-th off-diagonal χ_{N−k}/√N. Its spectral measure at the
/// first basis vector has the same law as that of sample_goe.
TridiagonalMatrix sample_tridiagonal_beta1(int n, Rng& rng);

/// Uniform absorption width Γ_abs = γΔ/(2π) = γ/(2N) in GOE units.
inline double absorption_width(double gamma, int n) { return gamma / (2.0 * n); }

/// K = [(−H + iΓ_abs/2)⁻¹]₁₁ (prefactor NΔ/π = 1 in these units); N is the
/// matrix dimension. The dense overload solves one complex linear system,
/// the tridiagonal one evaluates a bottom-up continued fraction.
/// Throws SingularSystem when γ = 0 and 0 is an eigenvalue.
GreensSample local_green(const Eigen::MatrixXd& h, double gamma);
GreensSample local_green(const TridiagonalMatrix& h, double gamma);

/// Fixed splitting rule for sub-stream seeds (SplitMix64 of seed and index).
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index);

/// Samples are produced in fixed-size blocks, each block seeded by
/// derive_seed(config.seed, block). Any partition of the blocks over
/// workers therefore yields the same sequence.
inline constexpr std::size_t kBlockSize = 256;

/// Samples [first, last) of the stream defined by config.
std::vector<GreensSample> sample_range(const EnsembleConfig& config, std::size_t first,
                                       std::size_t last);

/// The full stream, computed on up to `jobs` threads (0 = all cores).
std::vector<GreensSample> sample_stream(const EnsembleConfig& config, int jobs = 0);

/// The stream split into n_chunks contiguous sub-runs that are merged in
/// order; identical to sample_stream for any n_chunks.
std::vector<GreensSample> sample_stream_chunked(const EnsembleConfig& config, int n_chunks,
                                                int jobs = 0);

/// Matrix size used by the harness for a given γ: keeps the broadening
/// γ/(4N) well inside the band so finite-N bias stays below ~0.5%.
int recommended_matrix_size(double gamma);

}  // namespace resbg::rmt
