#include "resbg/analytic.hpp"

#include "resbg/error.hpp"
#include "resbg/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace resbg::analytic {

namespace {

constexpr double kCutoffRel = 1e-16;

void require_eta(double eta) {
  if (!(eta > 0.0) || !std::isfinite(eta)) throw DomainError("η must be positive and finite");
}

void require_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) throw DomainError("γ must be positive and finite");
}

// P0 with roundoff slack at the lower edge; zero off the support.
double p0_at(const P0Model& p0, double x) {
  if (std::isnan(x)) return 0.0;
  if (x >= 1.0) return std::isinf(x) ? 0.0 : p0.density(x);
  if (x > 1.0 - 1e-9) return p0.density(1.0);
  return 0.0;
}

QuadratureOptions inner_options() {
  QuadratureOptions opt;
  opt.abs_tol = 1e-10;
  opt.rel_tol = 1e-10;
  return opt;
}

// ∫_{lo}^{min(s0, hi)} dz 2 P0(x(z)) / (π (s0 − z)² √((hi − z)(z − lo))),
// x(z) = (a0 + b z)/(c (s0 − z)).
double line_integral(double lo, double hi, double s0, double a0, double b, double c,
                     const P0Model& p0) {
  const double top = std::min(s0, hi);
  if (!(lo < top)) return 0.0;
  const QuadratureOptions opt = inner_options();
  if (hi < s0) {
    // z = lo + (hi − lo) sin²φ
    auto f = [&](double phi) {
      const double s = std::sin(phi);
      const double z = lo + (hi - lo) * s * s;
      const double gap = s0 - z;
      return 4.0 / kPi * p0_at(p0, (a0 + b * z) / (c * gap)) / (gap * gap);
    };
    // x is increasing in z, so each P0 knot maps to one z.
    std::vector<double> breaks;
    for (double xk : p0.knots()) {
      const double z = (c * xk * s0 - a0) / (b + c * xk);
      if (z > lo && z < hi) breaks.push_back(std::asin(std::sqrt((z - lo) / (hi - lo))));
    }
    return integrate_with_breaks(f, 0.0, 0.5 * kPi, breaks, opt).value;
  }
  const double k = a0 + b * s0;
  if (!(k > 0.0)) return 0.0;
  // w = 1/(s0 − z) makes x linear in w; then w = w_min + τ².
  const double w_min = 1.0 / (s0 - lo);
  const double w_max = (c * p0.upper_cutoff(kCutoffRel) + b) / k;
  if (!(w_max > w_min)) return 0.0;
  auto f = [&](double tau) {
    const double w = w_min + tau * tau;
    const double z = s0 - 1.0 / w;
    const double x = (k * w - b) / c;
    const double px = p0_at(p0, x);
    if (px == 0.0) return 0.0;
    return 4.0 / kPi * std::sqrt(w * w_min) * px / std::sqrt(hi - z);
  };
  std::vector<double> breaks;
  for (double xk : p0.knots()) {
    const double w = (c * xk + b) / k;
    if (w > w_min && w < w_max) breaks.push_back(std::sqrt(w - w_min));
  }
  return integrate_with_breaks(f, 0.0, std::sqrt(w_max - w_min), breaks, opt).value;
}

double sec2(double theta) {
  const double c = std::cos(theta);
  return 1.0 / (c * c);
}

bool in_phase_range(double theta) { return std::abs(theta) < 0.5 * kPi; }

// e^{ξ} K_n(ξ) for n ∈ {0, 1}, stable for large ξ.
double scaled_bessel_k(int n, double xi) {
  if (xi < 500.0) return std::cyl_bessel_k(static_cast<double>(n), xi) * std::exp(xi);
  const double mu = 4.0 * n * n;
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < 12; ++k) {
    const double odd = 2.0 * k - 1.0;
    term *= (mu - odd * odd) / (k * 8.0 * xi);
    sum += term;
  }
  return std::sqrt(kPi / (2.0 * xi)) * sum;
}

}  // namespace

GaussianLimitParams gaussian_limit_params(double eta, double gamma) {
  require_eta(eta);
  require_gamma(gamma);
  const double a = 1.0 + eta;
  GaussianLimitParams g;
  g.mean_t = 1.0 / a;
  g.sigma2_theta = 4.0 * eta * eta / (gamma * a * a);
  g.sigma2_T = g.sigma2_theta / (a * a);
  return g;
}

double x_rt(double R, double T, double eta, double r0) {
  return ((1.0 + r0) * (R - r0) + T * (eta * eta + r0)) / (eta * (1.0 + r0) * (1.0 - R - T));
}

double x_ttheta(double T, double theta, double eta) {
  const double s = std::sqrt(T);
  const double c = std::cos(theta);
  return (T * (1.0 + eta * eta) - 2.0 * s * c + 1.0) / (2.0 * eta * s * (c - s));
}

double x_phase(double p, double theta, double eta) {
  return ((1.0 + p) * (1.0 + p) * sec2(theta) - 2.0 * p + eta * eta - 1.0) / (2.0 * eta * p);
}

double joint_rt_pdf(double R, double T, double eta, const P0Model& p0) {
  require_eta(eta);
  if (!(R >= 0.0 && T >= 0.0 && R <= 1.0 && T <= 1.0)) return 0.0;
  // 1 + 2RT − (1−R)² − (1−T)², written symmetric in R and T
  const double gap = 1.0 - (R + T);
  const double y = 2.0 * (R + T) - 1.0 - (R - T) * (R - T);
  if (!(gap > 0.0) || !(y > 0.0)) return 0.0;
  const double px = p0_at(p0, (R / eta + eta * T) / gap);
  if (px == 0.0) return 0.0;
  return 2.0 / (kPi * gap * gap * std::sqrt(y)) * px;
}

double transmission_pdf(double T, double eta, const P0Model& p0) {
  require_eta(eta);
  if (!(T > 0.0 && T < 1.0)) return 0.0;
  const double s = std::sqrt(T);
  return line_integral((1.0 - s) * (1.0 - s), (1.0 + s) * (1.0 + s), 1.0 - T, eta * eta * T, 1.0,
                       eta, p0);
}

double transmission_pdf_from_joint_rt(double T, double eta, const P0Model& p0) {
  require_eta(eta);
  if (!(T > 0.0 && T < 1.0)) return 0.0;
  const double s = std::sqrt(T);
  const double lo = (1.0 - s) * (1.0 - s);
  const double x_max = p0.upper_cutoff(kCutoffRel);
  const double r_max = (x_max * (1.0 - T) - eta * T) / (1.0 / eta + x_max);
  const double hi = std::min(r_max, 1.0 - T);
  if (!(hi > lo)) return 0.0;
  QuadratureOptions opt = inner_options();
  opt.left = Endpoint::inverse_sqrt;
  auto f = [&](double R) { return joint_rt_pdf(R, T, eta, p0); };
  return integrate_adaptive(f, lo, hi, opt).value;
}

double transmission_pdf_zero_absorption(double T, double eta) {
  require_eta(eta);
  if (!(T > 0.0 && T < 1.0)) return 0.0;
  return 1.0 / (kPi * std::sqrt(T * (1.0 - T)) * (eta * T + (1.0 - T) / eta));
}

double strong_absorption_transmission_pdf(double T, double eta, double gamma) {
  require_eta(eta);
  require_gamma(gamma);
  if (!(T > 0.0 && T < 1.0)) return 0.0;
  const double s = std::sqrt(T);
  const double a = 1.0 - (eta + 1.0) * s;
  const double expo = -gamma / (8.0 * eta) * a * a / (s * (1.0 - s));
  return std::sqrt(gamma * eta) * std::exp(expo) /
         (4.0 * std::sqrt(kPi) * (1.0 - s) * std::pow(T, 0.75) *
          std::sqrt(1.0 + (eta * eta - 1.0) * T));
}

double reflection_pdf(double R, double eta, double r0, const P0Model& p0) {
  require_eta(eta);
  if (!(std::abs(r0) < 1.0)) throw DomainError("reflection_pdf needs |r0| < 1");
  if (!(R > 0.0 && R < 1.0)) return 0.0;
  const double k = (1.0 + r0) / (1.0 - r0);
  const double s = std::sqrt(R);
  return line_integral(k * (1.0 - s) * (1.0 - s), k * (1.0 + s) * (1.0 + s), 1.0 - R,
                       (1.0 + r0) * (R - r0), eta * eta + r0, eta * (1.0 + r0), p0);
}

double phase_pdf_zero_absorption(double theta, double eta) {
  require_eta(eta);
  if (!in_phase_range(theta)) return 0.0;
  const double c = std::cos(theta);
  const double s = std::sin(theta);
  return 1.0 / (kPi * (eta * c * c + s * s / eta));
}

double joint_ttheta_pdf(double T, double theta, double eta, const P0Model& p0) {
  require_eta(eta);
  if (!(T > 0.0) || !in_phase_range(theta)) return 0.0;
  const double gap = std::cos(theta) - std::sqrt(T);
  if (!(gap > 0.0)) return 0.0;
  const double px = p0_at(p0, x_ttheta(T, theta, eta));
  if (px == 0.0) return 0.0;
  return px / (4.0 * kPi * T * gap * gap);
}

double transmission_pdf_from_joint_ttheta(double T, double eta, const P0Model& p0) {
  require_eta(eta);
  if (!(T > 0.0 && T < 1.0)) return 0.0;
  const double s = std::sqrt(T);
  const double x_max = p0.upper_cutoff(kCutoffRel);
  // cosθ at which x_η reaches x_max; x_η decreases with cosθ.
  const double c_min = (T * (1.0 + eta * eta) + 1.0 + 2.0 * eta * T * x_max) /
                       (2.0 * s * (1.0 + eta * x_max));
  if (!(c_min < 1.0)) return 0.0;
  const double theta_max = std::acos(std::max(c_min, s));
  auto f = [&](double theta) { return joint_ttheta_pdf(T, theta, eta, p0); };
  return 2.0 * integrate_adaptive(f, 0.0, theta_max, inner_options()).value;
}

double joint_ttheta_asymptotic(double T, double theta, double eta, double gamma) {
  require_eta(eta);
  require_gamma(gamma);
  if (!(T > 0.0) || !in_phase_range(theta)) return 0.0;
  const double s = std::sqrt(T);
  const double c = std::cos(theta);
  const double gap = c - s;
  if (!(gap > 0.0)) return 0.0;
  const double mt = 1.0 / (1.0 + eta);
  const double expo = -gamma * (1.0 + eta) * (1.0 + eta) / (8.0 * eta) *
                      (T - 2.0 * mt * s * c + mt * mt) / (s * gap);
  return gamma * std::exp(expo) / (16.0 * kPi * T * gap * gap);
}

double joint_ttheta_rician(double T, double theta, double eta, double gamma) {
  const GaussianLimitParams g = gaussian_limit_params(eta, gamma);
  if (!(T >= 0.0)) return 0.0;
  const double q = T - 2.0 * g.mean_t * std::sqrt(T) * std::cos(theta) + g.mean_t * g.mean_t;
  return std::exp(-q / (2.0 * g.sigma2_T)) / (4.0 * kPi * g.sigma2_T);
}

double phase_pdf(double theta, double eta, const P0Model& p0) {
  require_eta(eta);
  if (!in_phase_range(theta)) return 0.0;
  const double a = sec2(theta);
  if (!std::isfinite(a)) return 0.0;
  // x(p) ≤ x_max ⇔ a p² + (2a − 2 − 2η x_max) p + (a + η² − 1) ≤ 0.
  const double x_max = p0.upper_cutoff(kCutoffRel);
  const double bq = 2.0 * a - 2.0 - 2.0 * eta * x_max;
  const double cq = a + eta * eta - 1.0;
  const double disc = bq * bq - 4.0 * a * cq;
  if (!(disc > 0.0) || !(bq < 0.0)) return 0.0;
  const double p_hi = (-bq + std::sqrt(disc)) / (2.0 * a);
  const double p_lo = cq / (a * p_hi);
  auto f = [&](double s) {
    const double p = std::exp(s);
    const double px = p0_at(p0, x_phase(p, theta, eta));
    return px == 0.0 ? 0.0 : (1.0 + p) / p * px;
  };
  const double s_lo = std::log(p_lo);
  const double s_hi = std::log(p_hi);
  std::vector<double> breaks{0.0};
  for (double xk : p0.knots()) {
    const double bk = 2.0 * a - 2.0 - 2.0 * eta * xk;
    const double dk = bk * bk - 4.0 * a * cq;
    if (!(dk > 0.0) || !(bk < 0.0)) continue;
    const double root = (-bk + std::sqrt(dk)) / (2.0 * a);
    breaks.push_back(std::log(root));
    breaks.push_back(std::log(cq / (a * root)));
  }
  const double total = integrate_with_breaks(f, s_lo, s_hi, breaks, inner_options()).value;
  return a / (2.0 * kPi) * total;
}

double phase_pdf_weak(double theta, double eta, double gamma) {
  require_eta(eta);
  if (!(gamma >= 0.0)) throw DomainError("γ must be nonnegative");
  if (!in_phase_range(theta)) return 0.0;
  const double mu = gamma / (4.0 * eta) * (sec2(theta) - 1.0 + eta);
  const double factor = std::erfc(std::sqrt(mu)) + 2.0 * std::sqrt(mu / kPi) * std::exp(-mu);
  return phase_pdf_zero_absorption(theta, eta) * factor;
}

double phase_pdf_strong(double theta, double eta, double gamma) {
  require_eta(eta);
  require_gamma(gamma);
  if (!in_phase_range(theta)) return 0.0;
  const double a = sec2(theta);
  if (!std::isfinite(a)) return 0.0;
  const double g = gamma / (4.0 * eta);
  const double xi = g * std::sqrt(a) * std::sqrt(a - 1.0 + eta * eta);
  const double nu = g * (a - 1.0 - eta);
  const double bracket =
      scaled_bessel_k(0, xi) + gamma * a / (4.0 * eta * xi) * scaled_bessel_k(1, xi);
  return gamma * a / (4.0 * kPi) * bracket * std::exp(-xi - nu);
}

double phase_rigidity_pdf(double rho, double eta, const PhaseModel& model) {
  require_eta(eta);
  if (!(std::abs(rho) < 1.0)) return 0.0;
  const double root = std::sqrt(1.0 - rho * rho);
  if (model.p0() == nullptr) {
    return 2.0 / (kPi * root * (eta + 1.0 / eta + (eta - 1.0 / eta) * rho));
  }
  const double theta = std::acos(std::sqrt(0.5 * (1.0 + rho)));
  return phase_pdf(theta, eta, *model.p0()) / root;
}

}  // namespace resbg::analytic
