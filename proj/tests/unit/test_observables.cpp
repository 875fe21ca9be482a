#include "resbg/error.hpp"
#include "resbg/observables.hpp"
#include "resbg/stats.hpp"
#include "support.hpp"

#include <doctest.h>

#include <Eigen/Dense>

#include <cmath>
#include <complex>

using namespace resbg;
using rmt::GreensSample;

namespace {

void check_matrix(const Eigen::Matrix2cd& a, const Eigen::Matrix2cd& b, double tol) {
  CHECK((a - b).cwiseAbs().maxCoeff() < tol);
}

std::vector<GreensSample> draws(double gamma, std::size_t n, std::uint64_t seed) {
  rmt::EnsembleConfig cfg;
  cfg.n_levels = 64;
  cfg.gamma = gamma;
  cfg.seed = seed;
  cfg.n_samples = n;
  return rmt::sample_stream(cfg);
}

}  // namespace

TEST_SUITE("observables") {

TEST_CASE("decoupled background leaves the resonance matrix") {
  const auto p = ControlParams::from_t0(1.3, 1.0, 0.6);
  check_matrix(full_s_matrix({0.0, 0.0}, p), resonance_s0(p), 1e-15);
  const auto q = ControlParams::from_t0(0.0, 1.0, 0.6);
  check_matrix(full_s_matrix({0.7, 1.9}, q), resonance_s0(q), 1e-15);
}

TEST_CASE("S matrix at u = 0, v = 1, eta = 1") {
  Eigen::Matrix2cd expected;
  expected << 0.5, 0.5, 0.5, 0.5;
  check_matrix(full_s_matrix({0.0, 1.0}, ControlParams::perfect(1.0, 1.0)), expected, 1e-15);
}

TEST_CASE("observables at K = 0") {
  for (double eta : {0.2, 1.0, 4.0}) {
    const auto p = ControlParams::from_t0(eta, 0.0, 0.8);
    const auto pt = evaluate({0.0, 0.0}, p);
    CHECK(pt.t == std::complex<double>(0.8, 0.0));
    CHECK(pt.r_plus.real() == doctest::Approx(0.6));
    CHECK(pt.r_minus.real() == doctest::Approx(-0.6));
    CHECK(pt.T == doctest::Approx(0.64));
    CHECK(pt.theta_T == 0.0);
    CHECK(pt.d == 0.0);
    CHECK(pt.rho == 1.0);
  }
}

TEST_CASE("maximal loss point") {
  const auto pt = evaluate({0.0, 1.0}, ControlParams::perfect(1.0, 1.0));
  CHECK(pt.t.real() == doctest::Approx(0.5));
  CHECK(pt.T == doctest::Approx(0.25));
  CHECK(pt.R_plus == doctest::Approx(0.25));
  CHECK(pt.R_minus == doctest::Approx(0.25));
  CHECK(pt.theta_T == doctest::Approx(0.0));
  CHECK(pt.d == doctest::Approx(0.5));
}

TEST_CASE("lossless point with u = 1") {
  const auto pt = evaluate({1.0, 0.0}, ControlParams::perfect(1.0, 0.0));
  CHECK(pt.theta_T == doctest::Approx(-kPi / 4));
  CHECK(pt.T == doctest::Approx(0.5));
  CHECK(pt.R_plus == doctest::Approx(0.5));
  CHECK(pt.T == doctest::Approx(std::cos(pt.theta_T) * std::cos(pt.theta_T)));
}

TEST_CASE("closed-form amplitudes match the full S matrix") {
  for (double gamma : {0.0, 1.0, 50.0}) {
    for (const auto& s : draws(gamma, 500, 21)) {
      for (double eta : {0.2, 1.0, 5.0}) {
        for (double t0 : {1.0, 0.6}) {
          const auto p = ControlParams::from_t0(eta, gamma, t0);
          const auto m = full_s_matrix(s, p);
          const auto pt = evaluate(s, p);
          CHECK(std::abs(m(0, 1) - pt.t) < 1e-12);
          CHECK(std::abs(m(1, 0) - pt.t) < 1e-12);
          CHECK(std::abs(m(0, 0) - pt.r_plus) < 1e-12);
          CHECK(std::abs(m(1, 1) - pt.r_minus) < 1e-12);
        }
      }
    }
  }
}

TEST_CASE("unitarity deficit examples") {
  const auto p = ControlParams::perfect(1.0, 1.0);
  check_matrix(unitarity_deficit_matrix({0.4, 0.0}, p), Eigen::Matrix2cd::Zero(), 1e-15);
  const Eigen::Matrix2cd one_minus_s0 = Eigen::Matrix2cd::Identity() - resonance_s0(p);
  check_matrix(unitarity_deficit_matrix({0.0, 1.0}, p), 0.5 * one_minus_s0, 1e-15);
  CHECK(unitarity_deficit({0.0, 1.0}, 1.0) == doctest::Approx(0.5));
}

TEST_CASE("unitarity deficit identity on random samples") {
  for (double gamma : {0.0, 1.0, 50.0}) {
    for (const auto& s : draws(gamma, 400, 22)) {
      for (double eta : {0.2, 1.0, 5.0}) {
        const auto p = ControlParams::from_phi(eta, gamma, 0.3);
        const Eigen::Matrix2cd expected =
            (Eigen::Matrix2cd::Identity() - resonance_s0(p)) * unitarity_deficit(s, eta);
        check_matrix(unitarity_deficit_matrix(s, p), expected, 1e-12);
      }
    }
  }
}

TEST_CASE("lossy points: coefficients below 1, deficit in (0, 1/2], S subunitary") {
  for (const auto& s : draws(2.0, 2000, 23)) {
    for (double eta : {0.3, 1.0, 3.0}) {
      const auto p = ControlParams::perfect(eta, 2.0);
      const auto pt = evaluate(s, p);
      CHECK_UNARY(pt.T < 1.0);
      CHECK_UNARY(pt.R_plus < 1.0);
      CHECK_UNARY(pt.R_minus < 1.0);
      CHECK_UNARY(pt.d > 0.0);
      CHECK_UNARY(pt.d <= 0.5 + 1e-15);
      CHECK(std::abs(1.0 - pt.R_plus - pt.T - pt.d) < 1e-13);
      CHECK(std::abs(pt.rho - std::cos(2.0 * pt.theta_T)) < 1e-12);
      const Eigen::Matrix2cd loss = unitarity_deficit_matrix(s, p);
      Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(loss);
      CHECK(es.eigenvalues().minCoeff() > -1e-13);
    }
  }
}

TEST_CASE("background S matrix examples") {
  const auto p = ControlParams::perfect(1.0, 1.0);
  const auto a = background_smatrix({0.0, 0.0}, p);
  CHECK(std::abs(a.s_bg - 1.0) < 1e-15);
  CHECK(a.R_bg == doctest::Approx(1.0));
  const auto b = background_smatrix({0.0, 1.0}, p);
  CHECK(std::abs(b.s_bg) < 1e-15);
}

TEST_CASE("background parametrisation reproduces the amplitudes") {
  for (const auto& s : draws(1.5, 1000, 24)) {
    for (double phi : {0.1, kPi / 4, 1.3}) {
      const auto p = ControlParams::from_phi(0.7, 1.5, phi);
      const auto bg = background_smatrix(s, p);
      const auto pt = evaluate(s, p);
      CHECK(std::abs(bg.t - pt.t) < 1e-12);
      CHECK(std::abs(bg.r_plus - pt.r_plus) < 1e-12);
      CHECK(std::abs(bg.r_minus - pt.r_minus) < 1e-12);
      CHECK(std::abs(bg.s_bg) <= 1.0 + 1e-15);
    }
  }
}

TEST_CASE("ensemble mean of the background S matrix") {
  const auto p = ControlParams::from_phi(2.0, 1.0, kPi / 4);
  std::complex<double> sum = 0.0;
  const auto& samples = test::gamma1_samples();
  for (const auto& s : samples) sum += background_smatrix(s, p).s_bg;
  sum /= static_cast<double>(samples.size());
  CHECK(sum.real() == doctest::Approx(-1.0 / 3.0).epsilon(0.01));
}

TEST_CASE("mean amplitudes") {
  const auto a = mean_amplitudes(ControlParams::from_phi(1.0, 1.0, kPi / 4));
  CHECK(a.t == doctest::Approx(0.5));
  CHECK(a.r_plus == doctest::Approx(0.5));
  CHECK(a.r_minus == doctest::Approx(0.5));
  for (double phi : {0.2, 0.9}) {
    const auto b = mean_amplitudes(ControlParams::from_phi(0.0, 1.0, phi));
    CHECK(b.t == doctest::Approx(std::sin(2 * phi)));
    CHECK(b.r_plus == doctest::Approx(std::cos(2 * phi)));
    CHECK(b.r_minus == doctest::Approx(-std::cos(2 * phi)));
  }
}

TEST_CASE("Monte-Carlo mean of t at eta = 2") {
  const auto p = ControlParams::from_phi(2.0, 1.0, kPi / 4);
  const auto t = test::observe(test::gamma1_samples(), p,
                               [](const ScatteringPoint& x) { return x.t.real(); });
  CHECK(stats::moments(t).mean == doctest::Approx(1.0 / 3.0).epsilon(0.01));
}

TEST_CASE("zero-absorption identities at u = 0") {
  const auto p = ControlParams::from_t0(1.0, 0.0, 0.8);
  const auto pt = evaluate({0.0, 0.0}, p);
  const auto r = zero_absorption_check(pt, p);
  CHECK(r.passed);
  CHECK(pt.T == doctest::Approx(0.64));
}

TEST_CASE("zero-absorption phase relation with r0 = 0") {
  const auto p = ControlParams::perfect(1.0, 0.0);
  const auto pt = evaluate({1.0, 0.0}, p);
  const auto r = zero_absorption_check(pt, p);
  CHECK(r.passed);
  const double diff = std::remainder(pt.theta_R_plus - (kPi / 2 + pt.theta_T), kPi);
  CHECK(std::abs(diff) < 1e-12);
}

TEST_CASE("zero-absorption check on random lossless samples") {
  const auto samples = draws(0.0, 1000, 25);
  for (double t0 : {1.0, 0.8, 0.3}) {
    for (int sign : {1, -1}) {
      const auto p = ControlParams::from_t0(1.7, 0.0, t0, sign);
      for (const auto& s : samples) {
        const auto r = zero_absorption_check(evaluate(s, p), p, 1e-10);
        CHECK_MESSAGE(r.passed, r.detail);
      }
    }
  }
}

TEST_CASE("zero-absorption check refuses lossy points") {
  const auto p = ControlParams::perfect(1.0, 1.0);
  CHECK_THROWS_AS(zero_absorption_check(evaluate({0.1, 0.5}, p), p), InapplicableCheck);
}

TEST_CASE("t0 = 0 is flagged as degenerate") {
  const auto p = ControlParams::from_t0(1.0, 1.0, 0.0);
  const auto pt = evaluate({0.3, 0.4}, p);
  CHECK(pt.degenerate);
  CHECK(pt.T == 0.0);
  CHECK(pt.theta_T == 0.0);
}

}  // TEST_SUITE
