#include "resbg/stats.hpp"

#include "resbg/error.hpp"
#include "resbg/scales.hpp"

#include <algorithm>
#include <array>
#include <cmath>

namespace resbg::stats {

namespace {

std::size_t locate(const std::vector<double>& edges, double x) {
  if (x == edges.back()) return edges.size() - 2;
  const auto it = std::upper_bound(edges.begin(), edges.end(), x);
  return static_cast<std::size_t>(it - edges.begin()) - 1;
}

double node_x(double lo, double hi, double u) {
  return lo + 0.5 * (hi - lo) * (1.0 - std::cos(kPi * u));
}

constexpr std::array<double, 4> kGl4x = {-0.861136311594052575, -0.339981043584856265,
                                         0.339981043584856265, 0.861136311594052575};
constexpr std::array<double, 4> kGl4w = {0.347854845137453857, 0.652145154862546143,
                                         0.652145154862546143, 0.347854845137453857};

}  // namespace

std::vector<double> Histogram::densities() const {
  std::vector<double> d(counts.size(), 0.0);
  if (total == 0) return d;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    d[i] = counts[i] / (static_cast<double>(total) * width(i));
  }
  return d;
}

std::vector<double> Histogram::density_errors() const {
  std::vector<double> e(counts.size(), 0.0);
  if (total == 0) return e;
  for (std::size_t i = 0; i < counts.size(); ++i) {
    e[i] = std::sqrt(counts[i]) / (static_cast<double>(total) * width(i));
  }
  return e;
}

Histogram histogram(std::span<const double> samples, std::vector<double> edges) {
  if (samples.empty()) throw DomainError("histogram of an empty sample");
  if (edges.size() < 3) throw DomainError("histogram needs at least two bins");
  for (std::size_t i = 1; i < edges.size(); ++i) {
    if (!(edges[i] > edges[i - 1])) throw DomainError("histogram edges must increase");
  }
  Histogram h;
  h.edges = std::move(edges);
  h.counts.assign(h.edges.size() - 1, 0.0);
  for (double x : samples) {
    if (x < h.edges.front() || std::isnan(x)) {
      ++h.underflow;
    } else if (x > h.edges.back()) {
      ++h.overflow;
    } else {
      h.counts[locate(h.edges, x)] += 1.0;
      ++h.total;
    }
  }
  return h;
}

Histogram histogram(std::span<const double> samples, double lo, double hi, int n_bins) {
  if (n_bins < 2) throw DomainError("histogram needs at least two bins");
  if (!(hi > lo)) throw DomainError("histogram support must have lo < hi");
  std::vector<double> edges(static_cast<std::size_t>(n_bins) + 1);
  for (int i = 0; i <= n_bins; ++i) {
    edges[static_cast<std::size_t>(i)] = lo + (hi - lo) * i / n_bins;
  }
  edges.back() = hi;
  return histogram(samples, std::move(edges));
}

std::vector<double> log_edges(double lo, double hi, int n_bins) {
  if (!(lo > 0.0) || !(hi > lo) || n_bins < 2) throw DomainError("log_edges needs 0 < lo < hi");
  std::vector<double> e(static_cast<std::size_t>(n_bins) + 1);
  const double a = std::log(lo);
  const double b = std::log(hi);
  for (int i = 0; i <= n_bins; ++i) e[static_cast<std::size_t>(i)] = std::exp(a + (b - a) * i / n_bins);
  e.front() = lo;
  e.back() = hi;
  return e;
}

double Histogram2D::density(int i, int j) const {
  if (total == 0) return 0.0;
  return count(i, j) / (static_cast<double>(total) * dx() * dy());
}

Histogram2D histogram2d(std::span<const double> xs, std::span<const double> ys, double x_lo,
                        double x_hi, int nx, double y_lo, double y_hi, int ny) {
  if (xs.empty() || xs.size() != ys.size()) throw DomainError("2D histogram needs paired samples");
  if (nx < 2 || ny < 2 || !(x_hi > x_lo) || !(y_hi > y_lo)) {
    throw DomainError("2D histogram needs a nondegenerate box and ≥ 2 bins per axis");
  }
  Histogram2D h;
  h.x_lo = x_lo;
  h.x_hi = x_hi;
  h.y_lo = y_lo;
  h.y_hi = y_hi;
  h.nx = nx;
  h.ny = ny;
  h.counts.assign(static_cast<std::size_t>(nx * ny), 0.0);
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double x = xs[k];
    const double y = ys[k];
    if (!(x >= x_lo && x <= x_hi && y >= y_lo && y <= y_hi)) {
      ++h.outside;
      continue;
    }
    const int i = std::min(nx - 1, static_cast<int>((x - x_lo) / h.dx()));
    const int j = std::min(ny - 1, static_cast<int>((y - y_lo) / h.dy()));
    h.counts[static_cast<std::size_t>(i * ny + j)] += 1.0;
    ++h.total;
  }
  return h;
}

Histogram2D histogram2d(std::span<const double> xs, std::span<const double> ys, int nx, int ny) {
  if (xs.empty()) throw DomainError("2D histogram of an empty sample");
  const auto [x0, x1] = std::minmax_element(xs.begin(), xs.end());
  const auto [y0, y1] = std::minmax_element(ys.begin(), ys.end());
  return histogram2d(xs, ys, *x0, *x1, nx, *y0, *y1, ny);
}

double l1_distance(const Histogram2D& h, const std::function<double(double, double)>& density) {
  double total = 0.0;
  const double dx = h.dx();
  const double dy = h.dy();
  for (int i = 0; i < h.nx; ++i) {
    const double xc = h.x_lo + (i + 0.5) * dx;
    for (int j = 0; j < h.ny; ++j) {
      const double yc = h.y_lo + (j + 0.5) * dy;
      double avg = 0.0;
      for (std::size_t a = 0; a < 4; ++a) {
        for (std::size_t b = 0; b < 4; ++b) {
          avg += kGl4w[a] * kGl4w[b] * density(xc + 0.5 * dx * kGl4x[a], yc + 0.5 * dy * kGl4x[b]);
        }
      }
      avg *= 0.25;
      total += std::abs(h.density(i, j) - avg) * dx * dy;
    }
  }
  return total;
}

double l1_distance(const Histogram& h, const std::function<double(double)>& density) {
  static constexpr std::array<double, 3> x3 = {-0.774596669241483377, 0.0, 0.774596669241483377};
  static constexpr std::array<double, 3> w3 = {5.0 / 9.0, 8.0 / 9.0, 5.0 / 9.0};
  const std::vector<double> d = h.densities();
  double total = 0.0;
  for (std::size_t i = 0; i < h.n_bins(); ++i) {
    const double c = h.centre(i);
    const double w = h.width(i);
    double avg = 0.0;
    for (std::size_t k = 0; k < 3; ++k) avg += w3[k] * density(c + 0.5 * w * x3[k]);
    avg *= 0.5;
    total += std::abs(d[i] - avg) * w;
  }
  return total;
}

TabulatedCdf::TabulatedCdf(const std::function<double(double)>& density, double lo, double hi,
                           int n_cells, bool singular_left, bool singular_right, double abs_tol)
    : lo_(lo), hi_(hi) {
  if (!(hi > lo) || n_cells < 2) throw DomainError("TabulatedCdf needs lo < hi and ≥ 2 cells");
  f_.assign(static_cast<std::size_t>(n_cells) + 1, 0.0);
  QuadratureOptions opt;
  opt.abs_tol = abs_tol;
  opt.rel_tol = 1e-7;
  double x_prev = lo;
  for (int k = 1; k <= n_cells; ++k) {
    const double x = k == n_cells ? hi : node_x(lo, hi, static_cast<double>(k) / n_cells);
    opt.left = (k == 1 && singular_left) ? Endpoint::inverse_sqrt : Endpoint::regular;
    opt.right = (k == n_cells && singular_right) ? Endpoint::inverse_sqrt : Endpoint::regular;
    const double mass = integrate_adaptive(density, x_prev, x, opt).value;
    f_[static_cast<std::size_t>(k)] = f_[static_cast<std::size_t>(k) - 1] + mass;
    x_prev = x;
  }
  check_monotone();
}

TabulatedCdf::TabulatedCdf(double lo, double hi, std::vector<double> node_values)
    : lo_(lo), hi_(hi), f_(std::move(node_values)) {
  if (!(hi > lo) || f_.size() < 3) throw DomainError("TabulatedCdf needs lo < hi and ≥ 2 cells");
  check_monotone();
}

void TabulatedCdf::check_monotone() const {
  for (std::size_t k = 1; k < f_.size(); ++k) {
    if (f_[k] < f_[k - 1] - 1e-12) {
      throw DomainError("tabulated CDF decreases between nodes " + std::to_string(k - 1) +
                        " and " + std::to_string(k) + " (negative density or quadrature artifact)");
    }
  }
}

double TabulatedCdf::operator()(double x) const {
  if (!(x > lo_)) return 0.0;
  if (!(x < hi_)) return f_.back();
  const double n = static_cast<double>(f_.size() - 1);
  const double arg = std::clamp(1.0 - 2.0 * (x - lo_) / (hi_ - lo_), -1.0, 1.0);
  const double u = std::acos(arg) / kPi * n;
  const auto k = std::min(static_cast<std::size_t>(u), f_.size() - 2);
  const double w = u - static_cast<double>(k);
  return f_[k] + w * (f_[k + 1] - f_[k]);
}

double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf) {
  if (samples.empty()) throw DomainError("KS distance of an empty sample");
  std::vector<double> s(samples.begin(), samples.end());
  std::sort(s.begin(), s.end());
  const double n = static_cast<double>(s.size());
  double d = 0.0;
  double prev = -1e300;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const double f = cdf(s[i]);
    if (f < prev - 1e-12) throw DomainError("CDF is not monotone at x = " + std::to_string(s[i]));
    prev = f;
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

double ks_two_sample(std::span<const double> a, std::span<const double> b) {
  if (a.empty() || b.empty()) throw DomainError("two-sample KS needs nonempty samples");
  std::vector<double> x(a.begin(), a.end());
  std::vector<double> y(b.begin(), b.end());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  std::size_t i = 0;
  std::size_t j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double t = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == t) ++i;
    while (j < y.size() && y[j] == t) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return d;
}

namespace {

double ks_coefficient(double alpha) {
  if (alpha == 0.01) return 1.628;
  if (alpha == 0.05) return 1.358;
  return std::sqrt(-std::log(alpha / 2.0) / 2.0);
}

}  // namespace

double ks_two_sample_critical(std::size_t n, std::size_t m, double alpha) {
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  return ks_coefficient(alpha) * std::sqrt((dn + dm) / (dn * dm));
}

double ks_critical(std::size_t n, double alpha) {
  return ks_coefficient(alpha) / std::sqrt(static_cast<double>(n));
}

Moments moments(std::span<const double> samples) {
  if (samples.size() < 2) throw DomainError("moments need at least two samples");
  Moments m;
  m.n = samples.size();
  const double n = static_cast<double>(m.n);
  double sum = 0.0;
  for (double x : samples) sum += x;
  m.mean = sum / n;
  double m2 = 0.0;
  double m4 = 0.0;
  for (double x : samples) {
    const double d = x - m.mean;
    const double d2 = d * d;
    m2 += d2;
    m4 += d2 * d2;
  }
  m2 /= n;
  m4 /= n;
  m.variance = m2 * n / (n - 1.0);
  m.mean_se = std::sqrt(m.variance / n);
  m.variance_se = std::sqrt(std::max(0.0, m4 - m2 * m2) / n);
  return m;
}

}  // namespace resbg::stats
