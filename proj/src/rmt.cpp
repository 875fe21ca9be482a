#include "resbg/rmt.hpp"

#include "resbg/error.hpp"
#include "resbg/parallel.hpp"

#include <algorithm>
#include <cmath>
#include <complex>

namespace resbg::rmt {

std::string to_string(Sampler s) {
  switch (s) {
    case Sampler::dense_goe:
      return "dense_goe";
    case Sampler::tridiagonal_beta1:
      return "tridiagonal_beta1";
  }
  return "unknown";
}

Sampler sampler_from_string(std::string_view name) {
  if (name == "dense_goe" || name == "dense") return Sampler::dense_goe;
  if (name == "tridiagonal_beta1" || name == "tridiagonal") return Sampler::tridiagonal_beta1;
  throw DomainError("unknown sampler '" + std::string(name) +
                    "' (expected dense_goe or tridiagonal_beta1)");
}

void EnsembleConfig::validate() const {
  if (n_levels < 16 || n_levels % 2 != 0) {
    throw DomainError("matrix size N must be even and at least 16, got " +
                      std::to_string(n_levels));
  }
  if (!(gamma >= 0.0) || !std::isfinite(gamma)) {
    throw DomainError("absorption rate γ must be finite and nonnegative");
  }
  if (n_samples < 1) throw DomainError("n_samples must be at least 1");
}

double GreensSample::x() const {
  if (!(v > 0.0)) throw DomainError("x = (u²+v²+1)/(2v) is undefined for v = 0");
  return (u * u + v * v + 1.0) / (2.0 * v);
}

Eigen::MatrixXd TridiagonalMatrix::dense() const {
  const int n = size();
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(n, n);
  for (int k = 0; k < n; ++k) h(k, k) = diagonal[static_cast<std::size_t>(k)];
  for (int k = 0; k + 1 < n; ++k) {
    h(k, k + 1) = h(k + 1, k) = off_diagonal[static_cast<std::size_t>(k)];
  }
  return h;
}

Eigen::MatrixXd sample_goe(int n, Rng& rng) {
  if (n < 1) throw DomainError("GOE size must be positive");
  std::normal_distribution<double> normal;
  const double off_scale = 1.0 / std::sqrt(static_cast<double>(n));
  const double diag_scale = std::sqrt(2.0 / n);
  Eigen::MatrixXd h(n, n);
  for (int j = 0; j < n; ++j) {
    h(j, j) = diag_scale * normal(rng);
    for (int i = j + 1; i < n; ++i) {
      const double value = off_scale * normal(rng);
      h(i, j) = value;
      h(j, i) = value;
    }
  }
  return h;
}

TridiagonalMatrix sample_tridiagonal_beta1(int n, Rng& rng) {
  if (n < 1) throw DomainError("tridiagonal size must be positive");
  std::normal_distribution<double> normal;
  std::gamma_distribution<double> gamma;
  const double diag_scale = std::sqrt(2.0 / n);
  TridiagonalMatrix t;
  t.diagonal.resize(static_cast<std::size_t>(n));
  t.off_diagonal.resize(static_cast<std::size_t>(std::max(0, n - 1)));
  for (auto& d : t.diagonal) d = diag_scale * normal(rng);
  for (int k = 1; k < n; ++k) {
    // χ²_ν = Gamma(ν/2, scale 2).
    const double chi2 = gamma(rng, std::gamma_distribution<double>::param_type(0.5 * (n - k), 2.0));
    t.off_diagonal[static_cast<std::size_t>(k - 1)] = std::sqrt(chi2 / n);
  }
  return t;
}

namespace {

GreensSample from_resolvent(std::complex<double> g11) {
  // NΔ/π = 1 for Δ = π/N. "+ 0.0" folds a signed zero into +0.
  return GreensSample{g11.real() + 0.0, -g11.imag() + 0.0};
}

}  // namespace

GreensSample local_green(const Eigen::MatrixXd& h, double gamma) {
  const Eigen::Index n = h.rows();
  if (n == 0 || h.cols() != n) throw DomainError("local_green needs a square matrix");
  const double half_width = absorption_width(gamma, static_cast<int>(n)) / 2.0;
  Eigen::MatrixXcd a = (-h).cast<std::complex<double>>();
  a.diagonal().array() += std::complex<double>(0.0, half_width);
  Eigen::PartialPivLU<Eigen::MatrixXcd> lu(a);
  const auto& packed = lu.matrixLU();
  for (Eigen::Index k = 0; k < n; ++k) {
    if (packed(k, k) == std::complex<double>(0.0, 0.0)) {
      throw SingularSystem("resonance energy coincides with a background eigenvalue");
    }
  }
  Eigen::VectorXcd rhs = Eigen::VectorXcd::Zero(n);
  rhs(0) = 1.0;
  const Eigen::VectorXcd x = lu.solve(rhs);
  return from_resolvent(x(0));
}

GreensSample local_green(const TridiagonalMatrix& h, double gamma) {
  const int n = h.size();
  if (n == 0) throw DomainError("local_green needs a nonempty matrix");
  const std::complex<double> z(0.0, absorption_width(gamma, n) / 2.0);
  const std::complex<double> zero(0.0, 0.0);
  std::complex<double> g = z - h.diagonal.back();
  for (int k = n - 2; k >= 0; --k) {
    if (g == zero) throw SingularSystem("continued fraction hit an exact pole");
    const double e = h.off_diagonal[static_cast<std::size_t>(k)];
    g = z - h.diagonal[static_cast<std::size_t>(k)] - e * e / g;
  }
  if (g == zero) throw SingularSystem("continued fraction hit an exact pole");
  return from_resolvent(1.0 / g);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
  std::uint64_t z = seed + 0x9E3779B97F4A7C15ull * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

namespace {

GreensSample draw_one(const EnsembleConfig& config, Rng& rng) {
  // A singular draw has probability zero; redraw from the same stream.
  for (int attempt = 0;; ++attempt) {
    try {
      if (config.sampler == Sampler::dense_goe) {
        return local_green(sample_goe(config.n_levels, rng), config.gamma);
      }
      return local_green(sample_tridiagonal_beta1(config.n_levels, rng), config.gamma);
    } catch (const SingularSystem&) {
      if (attempt >= 100) throw;
    }
  }
}

}  // namespace

std::vector<GreensSample> sample_range(const EnsembleConfig& config, std::size_t first,
                                       std::size_t last) {
  config.validate();
  last = std::min(last, config.n_samples);
  std::vector<GreensSample> out;
  if (first >= last) return out;
  out.reserve(last - first);
  for (std::size_t block = first / kBlockSize; block * kBlockSize < last; ++block) {
    Rng rng(derive_seed(config.seed, block));
    const std::size_t begin = block * kBlockSize;
    const std::size_t end = std::min(begin + kBlockSize, last);
    for (std::size_t i = begin; i < end; ++i) {
      GreensSample s = draw_one(config, rng);
      if (i >= first) out.push_back(s);
    }
  }
  return out;
}

std::vector<GreensSample> sample_stream(const EnsembleConfig& config, int jobs) {
  config.validate();
  const std::size_t n_blocks = (config.n_samples + kBlockSize - 1) / kBlockSize;
  std::vector<GreensSample> out(config.n_samples);
  parallel_for(n_blocks, jobs, [&](std::size_t block) {
    const std::size_t begin = block * kBlockSize;
    const auto part = sample_range(config, begin, begin + kBlockSize);
    std::copy(part.begin(), part.end(), out.begin() + static_cast<std::ptrdiff_t>(begin));
  });
  return out;
}

std::vector<GreensSample> sample_stream_chunked(const EnsembleConfig& config, int n_chunks,
                                                int jobs) {
  config.validate();
  if (n_chunks < 1) throw DomainError("n_chunks must be positive");
  const auto chunks = static_cast<std::size_t>(n_chunks);
  std::vector<std::vector<GreensSample>> parts(chunks);
  parallel_for(chunks, jobs, [&](std::size_t c) {
    const std::size_t first = config.n_samples * c / chunks;
    const std::size_t last = config.n_samples * (c + 1) / chunks;
    parts[c] = sample_range(config, first, last);
  });
  std::vector<GreensSample> out;
  out.reserve(config.n_samples);
  for (auto& p : parts) out.insert(out.end(), p.begin(), p.end());
  return out;
}

int recommended_matrix_size(double gamma) {
  const int n = static_cast<int>(std::ceil(32.0 * gamma));
  return std::max(400, n + (n % 2));
}

}  // namespace resbg::rmt
