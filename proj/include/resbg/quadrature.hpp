#pragma once

#include <functional>
#include <span>

namespace resbg {

/// How an integrand behaves at a finite endpoint.
enum class Endpoint {
  regular,
  inverse_sqrt,  // f ~ (x − a)^(−1/2): handled by x = a + w²
};

struct QuadratureOptions {
  double abs_tol = 1e-8;
  double rel_tol = 0.0;
  int max_subdivisions = 10000;
  Endpoint left = Endpoint::regular;
  Endpoint right = Endpoint::regular;
};

struct QuadratureResult {
  double value = 0.0;
  double abs_error = 0.0;
  int subdivisions = 0;
  int evaluations = 0;
};

/// Global adaptive Gauss–Kronrod (7/15) quadrature of f over [a, b].
///
/// The interval with the largest error estimate is bisected until the
/// summed estimate drops below max(abs_tol, rel_tol·|value|). Endpoint
/// hints apply a w² substitution at that end; b = +infinity maps the range
/// through x = a + e^s and grows the s-window until the outer panels are
/// negligible. The integrand is never evaluated at a, b, or at hinted ends.
///
/// Throws QuadratureError (carrying the partial value and the estimate)
/// when the subdivision budget runs out.
QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureOptions& options = {});

/// As integrate_adaptive on a finite [a, b], with the initial partition cut
/// at `breaks` (points outside (a, b) are ignored). Endpoint hints are not
/// applied.
QuadratureResult integrate_with_breaks(const std::function<double(double)>& f, double a, double b,
                                       std::span<const double> breaks,
                                       const QuadratureOptions& options = {});

/// Fixed 15-point Kronrod rule on [a, b]; no error control.
double integrate_fixed(const std::function<double(double)>& f, double a, double b);

}  // namespace resbg
