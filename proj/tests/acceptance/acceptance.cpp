// Acceptance suite: one PASS/FAIL line per criterion, thresholds fixed below.
#include "resbg/analytic.hpp"
#include "resbg/error.hpp"
#include "resbg/formulas.hpp"
#include "resbg/harness.hpp"
#include "resbg/observables.hpp"
#include "resbg/p0.hpp"
#include "resbg/rmt.hpp"
#include "resbg/stats.hpp"

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <iostream>
#include <map>
#include <random>
#include <sstream>
#include <string>
#include <vector>

using namespace resbg;
using Clock = std::chrono::steady_clock;

namespace {

constexpr std::uint64_t kSeed = 20261018;

struct Outcome {
  bool passed = false;
  std::string detail;
};

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(4);
  os << v;
  return os.str();
}

std::vector<rmt::GreensSample> draw(double gamma, int n_levels, std::size_t n, std::uint64_t seed,
                                    rmt::Sampler sampler = rmt::Sampler::tridiagonal_beta1) {
  rmt::EnsembleConfig cfg;
  cfg.n_levels = n_levels;
  cfg.gamma = gamma;
  cfg.sampler = sampler;
  cfg.seed = seed;
  cfg.n_samples = n;
  return rmt::sample_stream(cfg);
}

CompareOptions options(const std::string& id, const ControlParams& p,
                       std::map<std::string, double> thresholds) {
  CompareOptions o;
  o.formula_id = id;
  o.params = p;
  o.ensemble.n_levels = rmt::recommended_matrix_size(p.gamma);
  o.thresholds = std::move(thresholds);
  return o;
}

// Shared state built on first use.
const P0Model& gamma1_p0() {
  static const P0Model m = calibrate_p0(1.0, 400, calibration_seed(kSeed + 5), 1'000'000);
  return m;
}

const std::vector<rmt::GreensSample>& gamma50_samples() {
  static const auto s = draw(50.0, rmt::recommended_matrix_size(50.0), 100000, kSeed + 7);
  return s;
}

// 1: <v> = 1 within 2% at N = 400, 1e5 tridiagonal samples, < 1 min.
Outcome criterion1() {
  const auto t0 = Clock::now();
  Outcome o{true, ""};
  for (double g : {0.1, 1.0, 5.0}) {
    const auto s = draw(g, 400, 100000, kSeed + 1);
    std::vector<double> v(s.size());
    for (std::size_t i = 0; i < s.size(); ++i) v[i] = s[i].v;
    const auto m = stats::moments(v);
    const bool ok = std::abs(m.mean - 1.0) <= 0.02;
    o.passed = o.passed && ok;
    o.detail += "gamma=" + fmt(g) + " <v>=" + fmt(m.mean) + "+-" + fmt(m.mean_se) + " ";
  }
  const double t = seconds_since(t0);
  o.passed = o.passed && t < 60.0;
  o.detail += "time=" + fmt(t) + "s";
  return o;
}

// 2: dense GOE vs tridiagonal x-samples, two-sample KS at the 1% level.
Outcome criterion2() {
  const auto a = draw(1.0, 200, 10000, kSeed + 2, rmt::Sampler::dense_goe);
  const auto b = draw(1.0, 200, 10000, kSeed + 3, rmt::Sampler::tridiagonal_beta1);
  std::vector<double> xa;
  std::vector<double> xb;
  for (const auto& s : a) xa.push_back(s.x());
  for (const auto& s : b) xb.push_back(s.x());
  const double d = stats::ks_two_sample(xa, xb);
  const double crit = stats::ks_two_sample_critical(xa.size(), xb.size(), 0.01);
  return {d < crit, "ks=" + fmt(d) + " critical=" + fmt(crit)};
}

// 3: 1 - S^dagger S = (1 - S0) d entrywise to 1e-12.
Outcome criterion3() {
  std::mt19937_64 rng(kSeed + 4);
  std::uniform_real_distribution<double> angle(0.0, kPi / 2);
  double worst = 0.0;
  std::size_t checked = 0;
  for (double g : {0.0, 1.0, 50.0}) {
    const auto s = draw(g, 64, 3334, rmt::derive_seed(kSeed + 4, static_cast<std::uint64_t>(g)));
    for (std::size_t i = 0; i < s.size(); ++i) {
      const double eta = std::array{0.2, 1.0, 5.0}[i % 3];
      const auto p = ControlParams::from_phi(eta, g, angle(rng));
      const Eigen::Matrix2cd lhs = unitarity_deficit_matrix(s[i], p);
      const Eigen::Matrix2cd rhs =
          (Eigen::Matrix2cd::Identity() - resonance_s0(p)) * unitarity_deficit(s[i], eta);
      worst = std::max(worst, (lhs - rhs).cwiseAbs().maxCoeff());
      ++checked;
    }
  }
  return {worst <= 1e-12, "samples=" + std::to_string(checked) + " max_residual=" + fmt(worst)};
}

// 4: zero-absorption intensity and phase constraints to 1e-10.
Outcome criterion4() {
  const auto s = draw(0.0, 200, 10000, kSeed + 5);
  double worst_i = 0.0;
  double worst_p = 0.0;
  std::size_t failed = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double eta = std::array{0.2, 1.0, 5.0}[i % 3];
    const double t0 = std::array{1.0, 0.8, 0.3}[(i / 3) % 3];
    const int sign = (i / 9) % 2 == 0 ? 1 : -1;
    const auto p = ControlParams::from_t0(eta, 0.0, t0, sign);
    const auto r = zero_absorption_check(evaluate(s[i], p), p, 1e-10);
    worst_i = std::max(worst_i, r.intensity_residual);
    if (r.phase_checked) worst_p = std::max(worst_p, r.phase_residual);
    failed += !r.passed;
    ++n;
  }
  return {failed == 0, "samples=" + std::to_string(n) + " failed=" + std::to_string(failed) +
                           " intensity_residual=" + fmt(worst_i) + " phase_residual=" + fmt(worst_p)};
}

// 5: transmission histograms at gamma = 1 against the exact law with empirical P0.
Outcome criterion5() {
  const auto t0 = Clock::now();
  const P0Model& p0 = gamma1_p0();
  Outcome o{true, ""};
  std::uint64_t k = 0;
  for (double eta : {0.2, 0.5, 1.0, 2.0}) {
    auto opt = options("p_t", ControlParams::perfect(eta, 1.0), {{"ks_max", 0.02}, {"norm_tol", 1e-3}});
    opt.ensemble.n_levels = 400;
    opt.ensemble.n_samples = 100000;
    opt.ensemble.seed = rmt::derive_seed(kSeed + 6, k++);
    opt.p0_model = p0;
    const auto c = compare(opt);
    const double ks = *c.report.ks_statistic;
    const double norm = *c.report.normalization;
    const bool ok = ks < 0.02 && std::abs(norm - 1.0) <= 1e-3;
    o.passed = o.passed && ok;
    o.detail += "eta=" + fmt(eta) + " ks=" + fmt(ks) + " norm=" + fmt(norm) + " ";
  }
  const double t = seconds_since(t0);
  o.passed = o.passed && t < 600.0;
  o.detail += "time=" + fmt(t) + "s (incl. calibration)";
  return o;
}

// 6: swap symmetry, reflection/transmission link, rigidity involution.
Outcome criterion6() {
  const P0Model& p0 = gamma1_p0();
  double swap = 0.0;
  for (double eta : {0.4, 1.0, 2.5}) {
    for (int i = 0; i < 50; ++i) {
      for (int j = 0; j < 50; ++j) {
        const double a = (i + 0.5) / 50.0;
        const double b = (j + 0.5) / 50.0;
        swap = std::max(swap, std::abs(analytic::joint_rt_pdf(a, b, eta, p0) -
                                       analytic::joint_rt_pdf(b, a, 1.0 / eta, p0)));
      }
    }
  }
  double link = 0.0;
  for (double eta : {0.3, 1.7}) {
    for (int i = 0; i < 40; ++i) {
      const double x = (i + 0.5) / 40.0;
      const double t = analytic::transmission_pdf(x, eta, p0);
      link = std::max(link, std::abs(analytic::reflection_pdf(x, 1.0 / eta, 0.0, p0) - t) / std::max(1.0, t));
    }
  }
  const auto zero = analytic::PhaseModel::zero_absorption();
  double inv = 0.0;
  for (double eta : {0.3, 1.0, 4.0}) {
    for (int i = 0; i < 200; ++i) {
      const double rho = -0.995 + 1.99 * i / 199.0;
      inv = std::max(inv, std::abs(analytic::phase_rigidity_pdf(rho, eta, zero) -
                                   analytic::phase_rigidity_pdf(-rho, 1.0 / eta, zero)));
    }
  }
  return {swap <= 1e-10 && link <= 1e-6 && inv <= 1e-12,
          "swap=" + fmt(swap) + " link=" + fmt(link) + " involution=" + fmt(inv)};
}

// 7: strong-absorption closures and Gaussian-limit variances.
Outcome criterion7() {
  const auto& s = gamma50_samples();
  const auto p = ControlParams::perfect(1.0, 50.0);
  const double ks_t = *compare(options("p_t_strong", p, {}), s).report.ks_statistic;
  const double ks_th = *compare(options("p_theta_strong", p, {}), s).report.ks_statistic;
  const auto p100 = ControlParams::perfect(1.0, 100.0);
  const auto s100 = draw(100.0, rmt::recommended_matrix_size(100.0), 100000, kSeed + 8);
  const auto g = compare(options(kGaussianLimit, p100, {}), s100).report;
  const double rt = g.analytic_values.at("var_ratio_sqrt_T");
  const double rth = g.analytic_values.at("var_ratio_theta");
  const bool ok = ks_t < 0.03 && ks_th < 0.03 && std::abs(rt - 1.0) <= 0.1 && std::abs(rth - 1.0) <= 0.1;
  return {ok, "ks_T=" + fmt(ks_t) + " ks_theta=" + fmt(ks_th) + " var_ratio_sqrt_T=" + fmt(rt) +
                  " var_ratio_theta=" + fmt(rth)};
}

// 8: the asymptotic joint law beats the Rician one in L1.
Outcome criterion8() {
  const auto& s = gamma50_samples();
  Outcome o{true, ""};
  for (double eta : {0.3, 1.0, 3.0}) {
    const auto p = ControlParams::perfect(eta, 50.0);
    const double asym = *compare(options("joint_ttheta_asym", p, {}), s).report.l1_distance;
    const double rice = *compare(options("joint_ttheta_rice", p, {}), s).report.l1_distance;
    const bool strict = eta != 1.0;
    const bool ok = strict ? asym < rice : asym <= rice;
    o.passed = o.passed && ok;
    o.detail += "eta=" + fmt(eta) + " l1_asym=" + fmt(asym) + " l1_rice=" + fmt(rice) + " ";
  }
  return o;
}

// 9: mean amplitudes within 3 standard errors.
Outcome criterion9() {
  auto opt = options(kMeanAmplitudes, ControlParams::from_phi(2.0, 1.0, kPi / 4), {{"se_band", 3.0}});
  opt.ensemble.n_levels = 400;
  opt.ensemble.n_samples = 100000;
  opt.ensemble.seed = kSeed + 9;
  const auto r = compare(opt).report;
  std::string detail;
  for (const auto& c : r.criteria) detail += c.name.substr(5, c.name.size() - 16) + "=" + fmt(c.value) + "se ";
  return {r.passed() && r.criteria.size() == 6, detail};
}

// 10: R+ support edge for r0 = 0.6 and normalization of the reflection law.
Outcome criterion10() {
  const auto s = draw(1.0, 400, 100000, kSeed + 10);
  const P0Model& p0 = gamma1_p0();
  double lowest = 1.0;
  double worst_norm = 0.0;
  for (double eta : {0.5, 1.0, 2.0}) {
    const auto p = ControlParams::from_t0(eta, 1.0, 0.8, +1);
    for (const auto& g : s) lowest = std::min(lowest, evaluate(g, p).R_plus);
    worst_norm = std::max(worst_norm, std::abs(normalization(BoundFormula("p_r", p, p0), 1e-7) - 1.0));
  }
  return {lowest >= 0.36 - 1e-12 && worst_norm <= 1e-3,
          "min_R+=" + fmt(lowest) + " max|norm-1|=" + fmt(worst_norm)};
}

// 11: weak-absorption phase law vs MC, and its gamma -> 0 limit.
Outcome criterion11() {
  auto opt = options("p_theta_weak", ControlParams::perfect(1.0, 0.1), {});
  opt.ensemble.n_samples = 100000;
  opt.ensemble.seed = kSeed + 11;
  const auto c = compare(opt);
  const double ks = *c.report.ks_statistic;
  double limit = 0.0;
  for (double eta : {0.5, 1.0, 2.0}) {
    for (int i = 0; i < 200; ++i) {
      const double th = -kPi / 2 + kPi * (i + 0.5) / 200.0;
      limit = std::max(limit, std::abs(analytic::phase_pdf_weak(th, eta, 1e-8) -
                                       analytic::phase_pdf_zero_absorption(th, eta)));
    }
  }
  return {ks < 0.02 && limit <= 1e-6, "ks=" + fmt(ks) + " normalization=" +
                                          fmt(*c.report.normalization) + " limit_residual=" + fmt(limit)};
}

// 12: closed-form normalizations and joint -> marginal consistency.
Outcome criterion12() {
  double norm = 0.0;
  for (const char* id : {"p_t0", "p_theta0"}) {
    for (double eta : {0.2, 1.0, 5.0}) {
      norm = std::max(norm, std::abs(normalization(BoundFormula(id, ControlParams::perfect(eta, 0.0)), 1e-11) - 1.0));
    }
  }
  const P0Model& p0 = gamma1_p0();
  double marg = 0.0;
  for (double eta : {0.5, 2.0}) {
    for (double t : {0.05, 0.2, 0.4, 0.6, 0.8, 0.95}) {
      const double ref = analytic::transmission_pdf(t, eta, p0);
      marg = std::max(marg, std::abs(analytic::transmission_pdf_from_joint_rt(t, eta, p0) - ref));
      marg = std::max(marg, std::abs(analytic::transmission_pdf_from_joint_ttheta(t, eta, p0) - ref));
    }
  }
  return {norm <= 1e-8 && marg <= 1e-4, "max|norm-1|=" + fmt(norm) + " marginal_residual=" + fmt(marg)};
}

}  // namespace

int main() {
  const std::vector<std::function<Outcome()>> criteria = {
      criterion1, criterion2, criterion3, criterion4,  criterion5,  criterion6,
      criterion7, criterion8, criterion9, criterion10, criterion11, criterion12};
  int failed = 0;
  for (std::size_t i = 0; i < criteria.size(); ++i) {
    const auto t0 = Clock::now();
    Outcome o;
    try {
      o = criteria[i]();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    failed += !o.passed;
    std::printf("criterion %2zu: %s  %s [%.1fs]\n", i + 1, o.passed ? "PASS" : "FAIL", o.detail.c_str(),
                seconds_since(t0));
    std::fflush(stdout);
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
  return failed == 0 ? 0 : 1;
}
