#include "resbg/error.hpp"
#include "resbg/rmt.hpp"
#include "resbg/scales.hpp"
#include "resbg/stats.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>

using namespace resbg;
using namespace resbg::rmt;

TEST_SUITE("rmt") {

TEST_CASE("dense GOE draws are exactly symmetric") {
  Rng rng(1);
  const Eigen::MatrixXd h = sample_goe(50, rng);
  CHECK((h - h.transpose()).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("dense GOE entry variances") {
  const int n = 200;
  Rng rng(2);
  double off2 = 0.0;
  double diag2 = 0.0;
  std::size_t n_off = 0;
  std::size_t n_diag = 0;
  while (n_off < 1000000) {
    const Eigen::MatrixXd h = sample_goe(n, rng);
    for (int i = 0; i < n; ++i) {
      diag2 += h(i, i) * h(i, i);
      ++n_diag;
      for (int j = i + 1; j < n; ++j) {
        off2 += h(i, j) * h(i, j);
        ++n_off;
      }
    }
  }
  CHECK(off2 / n_off * n == doctest::Approx(1.0).epsilon(0.01));
  CHECK(diag2 / n_diag * n == doctest::Approx(2.0).epsilon(0.05));
}

TEST_CASE("dense GOE spectrum follows the semicircle") {
  const int n = 200;
  Rng rng(3);
  std::vector<double> eigs;
  for (int k = 0; k < 200; ++k) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(sample_goe(n, rng), Eigen::EigenvaluesOnly);
    for (int i = 0; i < n; ++i) eigs.push_back(es.eigenvalues()(i));
  }
  const auto h = stats::histogram(eigs, -2.2, 2.2, 44);
  const double l1 = stats::l1_distance(h, [](double x) {
    return std::abs(x) < 2.0 ? std::sqrt(4.0 - x * x) / (2.0 * kPi) : 0.0;
  });
  CHECK(l1 < 0.05);
}

TEST_CASE("tridiagonal off-diagonals are positive, diagonal variance 2/N") {
  const int n = 400;
  Rng rng(4);
  double d2 = 0.0;
  std::size_t count = 0;
  for (int k = 0; k < 200; ++k) {
    const auto t = sample_tridiagonal_beta1(n, rng);
    REQUIRE(t.size() == n);
    REQUIRE(t.off_diagonal.size() == static_cast<std::size_t>(n - 1));
    for (double e : t.off_diagonal) CHECK_UNARY(e > 0.0);
    for (double d : t.diagonal) d2 += d * d;
    count += t.diagonal.size();
  }
  CHECK(d2 / count * n == doctest::Approx(2.0).epsilon(0.02));
}

TEST_CASE("tridiagonal off-diagonal k follows chi with N - k degrees of freedom") {
  const int n = 64;
  Rng rng(5);
  std::vector<double> sum2(n - 1, 0.0);
  const int draws = 20000;
  for (int k = 0; k < draws; ++k) {
    const auto t = sample_tridiagonal_beta1(n, rng);
    for (int j = 0; j < n - 1; ++j) sum2[j] += t.off_diagonal[j] * t.off_diagonal[j];
  }
  // E[χ²_m / N] = m / N, m = N − k for the k-th (1-based) entry.
  for (int j : {0, 10, 40, 62}) {
    const double m = n - (j + 1);
    CHECK(sum2[j] / draws * n == doctest::Approx(m).epsilon(0.05));
  }
}

TEST_CASE("single-level resolvent") {
  Eigen::MatrixXd h = Eigen::MatrixXd::Zero(1, 1);
  // N = 1: Γ_abs = γ/2, K = (iγ/4)⁻¹ = −4i/γ.
  const auto k = local_green(h, 2.0);
  CHECK(k.u == doctest::Approx(0.0));
  CHECK(k.v == doctest::Approx(2.0));
  TridiagonalMatrix t{{0.0}, {}};
  CHECK(local_green(t, 2.0).v == doctest::Approx(2.0));
}

TEST_CASE("zero absorption gives v = 0 exactly") {
  Rng rng(6);
  for (int k = 0; k < 20; ++k) {
    CHECK(local_green(sample_goe(32, rng), 0.0).v == 0.0);
    CHECK(local_green(sample_tridiagonal_beta1(32, rng), 0.0).v == 0.0);
  }
}

TEST_CASE("exact pole at zero absorption is a singular system") {
  CHECK_THROWS_AS(local_green(Eigen::MatrixXd::Zero(2, 2), 0.0), SingularSystem);
  CHECK_THROWS_AS(local_green(TridiagonalMatrix{{0.0, 0.0}, {0.0}}, 0.0), SingularSystem);
}

TEST_CASE("continued fraction equals direct inversion") {
  Rng rng(7);
  for (int n = 3; n <= 50; ++n) {
    const auto t = sample_tridiagonal_beta1(n, rng);
    for (double gamma : {0.0, 0.3, 5.0}) {
      const double g_abs = absorption_width(gamma, n);
      Eigen::MatrixXcd a = -t.dense().cast<std::complex<double>>();
      a.diagonal().array() += std::complex<double>(0.0, g_abs / 2.0);
      Eigen::VectorXcd e1 = Eigen::VectorXcd::Zero(n);
      e1(0) = 1.0;
      const std::complex<double> k = a.partialPivLu().solve(e1)(0);
      const auto cf = local_green(t, gamma);
      const double scale = std::max(1.0, std::abs(k));
      CHECK(std::abs(cf.u - k.real()) < 1e-10 * scale);
      CHECK(std::abs(cf.v + k.imag()) < 1e-10 * scale);
      const auto dense = local_green(t.dense(), gamma);
      CHECK(std::abs(dense.u - k.real()) < 1e-10 * scale);
      CHECK(std::abs(dense.v + k.imag()) < 1e-10 * scale);
    }
  }
}

TEST_CASE("x is at least 1 and undefined at v = 0") {
  EnsembleConfig cfg;
  cfg.n_levels = 64;
  cfg.gamma = 0.7;
  cfg.seed = 8;
  cfg.n_samples = 5000;
  for (const auto& s : sample_stream(cfg)) {
    CHECK_UNARY(s.v > 0.0);
    CHECK_UNARY(s.x() >= 1.0);
  }
  GreensSample zero{0.3, 0.0};
  CHECK_FALSE(zero.has_x());
  CHECK_THROWS_AS(zero.x(), DomainError);
}

TEST_CASE("ensemble configuration validation") {
  EnsembleConfig cfg;
  cfg.n_levels = 15;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg.n_levels = 17;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg.n_levels = 16;
  cfg.gamma = -1.0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg.gamma = 1.0;
  cfg.n_samples = 0;
  CHECK_THROWS_AS(cfg.validate(), DomainError);
  cfg.n_samples = 1;
  CHECK_NOTHROW(cfg.validate());
  CHECK_THROWS_AS(sampler_from_string("lanczos"), DomainError);
  CHECK(sampler_from_string("dense") == Sampler::dense_goe);
  CHECK(sampler_from_string(to_string(Sampler::tridiagonal_beta1)) == Sampler::tridiagonal_beta1);
}

TEST_CASE("streams are deterministic and independent of chunking") {
  EnsembleConfig cfg;
  cfg.n_levels = 100;
  cfg.gamma = 1.0;
  cfg.seed = 9;
  cfg.n_samples = 3000;
  const auto a = sample_stream(cfg, 1);
  const auto b = sample_stream(cfg, 4);
  CHECK(a == b);
  const auto c = sample_stream_chunked(cfg, 4);
  auto sorted_a = a;
  auto sorted_c = c;
  auto less = [](const GreensSample& x, const GreensSample& y) {
    return x.u < y.u || (x.u == y.u && x.v < y.v);
  };
  std::sort(sorted_a.begin(), sorted_a.end(), less);
  std::sort(sorted_c.begin(), sorted_c.end(), less);
  CHECK(sorted_a == sorted_c);
  const auto part = sample_range(cfg, 1000, 1300);
  CHECK(std::equal(part.begin(), part.end(), a.begin() + 1000));
  cfg.seed = 10;
  CHECK_FALSE(sample_stream(cfg, 1) == a);
}

TEST_CASE("zero-absorption streams have v = 0") {
  EnsembleConfig cfg;
  cfg.n_levels = 64;
  cfg.gamma = 0.0;
  cfg.seed = 11;
  cfg.n_samples = 2000;
  for (const auto& s : sample_stream(cfg)) CHECK(s.v == 0.0);
}

TEST_CASE("derived seeds are distinct and reproducible") {
  CHECK(derive_seed(1, 0) == derive_seed(1, 0));
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 0) != derive_seed(2, 0));
}

TEST_CASE("mean of v is 1 at N = 400, gamma = 1") {
  EnsembleConfig cfg;
  cfg.n_levels = 400;
  cfg.gamma = 1.0;
  cfg.seed = 12;
  cfg.n_samples = 20000;
  std::vector<double> v;
  for (const auto& s : sample_stream(cfg)) v.push_back(s.v);
  const auto m = stats::moments(v);
  CHECK(std::abs(m.mean - 1.0) < std::max(0.03, 4.0 * m.mean_se));
}

TEST_CASE("dense and tridiagonal samplers agree in distribution") {
  EnsembleConfig cfg;
  cfg.n_levels = 64;
  cfg.gamma = 1.0;
  cfg.n_samples = 2000;
  cfg.seed = 13;
  cfg.sampler = Sampler::dense_goe;
  std::vector<double> xd;
  for (const auto& s : sample_stream(cfg)) xd.push_back(s.x());
  cfg.sampler = Sampler::tridiagonal_beta1;
  cfg.seed = 14;
  std::vector<double> xt;
  for (const auto& s : sample_stream(cfg)) xt.push_back(s.x());
  CHECK(stats::ks_two_sample(xd, xt) < stats::ks_two_sample_critical(xd.size(), xt.size(), 0.01));
}

TEST_CASE("recommended matrix size") {
  for (double g : {0.0, 0.1, 1.0, 5.0, 50.0, 100.0}) {
    const int n = recommended_matrix_size(g);
    CHECK(n >= 400);
    CHECK(n % 2 == 0);
    CHECK(g / (4.0 * n) <= 1.0 / 128.0);
  }
}

}  // TEST_SUITE
