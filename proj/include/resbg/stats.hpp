#pragma once

#include "resbg/quadrature.hpp"

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

namespace resbg::stats {

/// 1D histogram; samples outside [edges.front(), edges.back()) land in
/// underflow/overflow and are excluded from the densities.
struct Histogram {
  std::vector<double> edges;
  std::vector<double> counts;
  std::size_t underflow = 0;
  std::size_t overflow = 0;
  std::size_t total = 0;  // in-range count

  std::size_t n_bins() const { return counts.size(); }
  double centre(std::size_t i) const { return 0.5 * (edges[i] + edges[i + 1]); }
  double width(std::size_t i) const { return edges[i + 1] - edges[i]; }
  /// count/(total·width): integrates to 1 over the in-range bins.
  std::vector<double> densities() const;
  /// Poisson standard error of each density.
  std::vector<double> density_errors() const;
};

/// Uniform bins on [lo, hi]; the last bin is closed on the right. Throws
/// DomainError for empty samples, n_bins < 2 or lo ≥ hi.
Histogram histogram(std::span<const double> samples, double lo, double hi, int n_bins);
/// Explicit (e.g. log-spaced) increasing edges.
Histogram histogram(std::span<const double> samples, std::vector<double> edges);
/// Log-spaced edges on [lo, hi], lo > 0.
std::vector<double> log_edges(double lo, double hi, int n_bins);

/// 2D histogram on a uniform nx × ny box; counts are row-major (x outer).
struct Histogram2D {
  double x_lo = 0, x_hi = 1, y_lo = 0, y_hi = 1;
  int nx = 50, ny = 50;
  std::vector<double> counts;
  std::size_t outside = 0;
  std::size_t total = 0;  // in-box count

  double dx() const { return (x_hi - x_lo) / nx; }
  double dy() const { return (y_hi - y_lo) / ny; }
  double count(int i, int j) const { return counts[static_cast<std::size_t>(i * ny + j)]; }
  /// count/(total·cell area).
  double density(int i, int j) const;
};

Histogram2D histogram2d(std::span<const double> xs, std::span<const double> ys, double x_lo,
                        double x_hi, int nx, double y_lo, double y_hi, int ny);
/// Box spanning the sample range on both axes.
Histogram2D histogram2d(std::span<const double> xs, std::span<const double> ys, int nx, int ny);

/// Σ |ĥ − ā|·area over the box, ā the analytic density averaged over each
/// cell with a 4×4 Gauss–Legendre rule. Mass outside the box is ignored.
double l1_distance(const Histogram2D& h, const std::function<double(double, double)>& density);
/// 1D analogue: Σ |ĥ − ā|·width with 3-point cell averages.
double l1_distance(const Histogram& h, const std::function<double(double)>& density);

/// Analytic CDF obtained by cumulative quadrature of a density on [lo, hi].
///
/// Nodes are clustered at both ends (x = lo + (hi−lo)(1 − cos πu)/2, u
/// uniform) and F is interpolated linearly in u, which is exact to leading
/// order for inverse-square-root edge singularities. F is not rescaled:
/// total() reports the integral of the density over [lo, hi].
class TabulatedCdf {
 public:
  TabulatedCdf(const std::function<double(double)>& density, double lo, double hi,
               int n_cells = 1000, bool singular_left = false, bool singular_right = false,
               double abs_tol = 1e-11);
  /// From precomputed node values F(x(u_k)), u_k = k/n; throws DomainError
  /// if F decreases.
  TabulatedCdf(double lo, double hi, std::vector<double> node_values);

  double operator()(double x) const;
  double total() const { return f_.back(); }
  double lo() const { return lo_; }
  double hi() const { return hi_; }

 private:
  void check_monotone() const;
  double lo_;
  double hi_;
  std::vector<double> f_;
};

/// sup |F_n − F| over the samples. F is evaluated at each sorted sample;
/// a decrease by more than 1e−12 throws DomainError (non-monotone CDF).
double ks_distance(std::span<const double> samples, const std::function<double(double)>& cdf);

/// Two-sample KS statistic.
double ks_two_sample(std::span<const double> a, std::span<const double> b);
/// Asymptotic critical value c(α)·√((n+m)/(nm)); c = 1.628 at α = 0.01,
/// 1.358 at α = 0.05, otherwise √(−ln(α/2)/2).
double ks_two_sample_critical(std::size_t n, std::size_t m, double alpha = 0.01);
/// One-sample 1 − α critical value, c(α)/√n.
double ks_critical(std::size_t n, double alpha = 0.01);

struct Moments {
  std::size_t n = 0;
  double mean = 0.0;
  double mean_se = 0.0;
  double variance = 0.0;  // unbiased
  double variance_se = 0.0;
};

/// Mean and variance with standard errors (variance SE from the fourth
/// central moment). Throws DomainError for fewer than two samples.
Moments moments(std::span<const double> samples);

}  // namespace resbg::stats
