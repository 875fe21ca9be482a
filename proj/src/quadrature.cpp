#include "resbg/quadrature.hpp"

#include "resbg/error.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <span>
#include <sstream>
#include <vector>

namespace resbg {

namespace {

// QUADPACK 15-point Kronrod abscissae/weights and the embedded 7-point Gauss weights.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  double a;
  double b;
  double value;
  double error;
  bool operator<(const Panel& other) const { return error < other.error; }
};

Panel kronrod(const std::function<double(double)>& f, double a, double b, int& evals) {
  const double centre = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(centre);
  double kronrod_sum = fc * kWgk[7];
  double gauss_sum = fc * kWg[3];
  double abs_sum = std::abs(kronrod_sum);
  std::array<double, 7> f1{};
  std::array<double, 7> f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kXgk[static_cast<std::size_t>(j)];
    f1[static_cast<std::size_t>(j)] = f(centre - dx);
    f2[static_cast<std::size_t>(j)] = f(centre + dx);
    const double pair = f1[static_cast<std::size_t>(j)] + f2[static_cast<std::size_t>(j)];
    kronrod_sum += kWgk[static_cast<std::size_t>(j)] * pair;
    abs_sum += kWgk[static_cast<std::size_t>(j)] *
               (std::abs(f1[static_cast<std::size_t>(j)]) + std::abs(f2[static_cast<std::size_t>(j)]));
    if (j % 2 == 1) gauss_sum += kWg[static_cast<std::size_t>(j / 2)] * pair;
  }
  evals += 15;
  const double mean = 0.5 * kronrod_sum;
  double asc = kWgk[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    asc += kWgk[static_cast<std::size_t>(j)] *
           (std::abs(f1[static_cast<std::size_t>(j)] - mean) + std::abs(f2[static_cast<std::size_t>(j)] - mean));
  }
  const double value = kronrod_sum * half;
  double err = std::abs((kronrod_sum - gauss_sum) * half);
  asc *= std::abs(half);
  if (asc != 0.0 && err != 0.0) {
    err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  }
  const double resabs = abs_sum * std::abs(half);
  const double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(50.0 * eps * resabs, err);
  }
  if (!std::isfinite(value)) {
    std::ostringstream os;
    os << "integrand is not finite on [" << a << ", " << b << "]";
    throw QuadratureError(os.str(), 0.0, std::numeric_limits<double>::infinity());
  }
  return Panel{a, b, value, err};
}

QuadratureResult adaptive_finite(const std::function<double(double)>& f, double a, double b,
                                 const QuadratureOptions& opt,
                                 std::span<const double> breaks = {}) {
  QuadratureResult result;
  if (a == b) return result;
  std::vector<double> cuts{a};
  for (double x : breaks) {
    if (x > a && x < b) cuts.push_back(x);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
  std::vector<Panel> heap;
  double total = 0.0;
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
    heap.push_back(kronrod(f, cuts[i], cuts[i + 1], result.evaluations));
    total += heap.back().value;
    error += heap.back().error;
  }
  std::make_heap(heap.begin(), heap.end());
  // Panels too narrow to split in floating point are retired here.
  double retired_value = 0.0;
  double retired_error = 0.0;
  double live_value = total;
  double live_error = error;
  const double min_width =
      64 * std::numeric_limits<double>::epsilon() * std::max({std::abs(a), std::abs(b), 1e-300});
  while (error > std::max(opt.abs_tol, opt.rel_tol * std::abs(total)) && !heap.empty()) {
    if (result.subdivisions >= opt.max_subdivisions) {
      std::ostringstream os;
      os << "adaptive quadrature did not converge on [" << a << ", " << b << "] after "
         << result.subdivisions << " subdivisions (estimate " << error << ")";
      throw QuadratureError(os.str(), total, error);
    }
    std::pop_heap(heap.begin(), heap.end());
    const Panel worst = heap.back();
    heap.pop_back();
    if (worst.b - worst.a <= min_width) {
      retired_value += worst.value;
      retired_error += worst.error;
      live_value -= worst.value;
      live_error -= worst.error;
      continue;
    }
    const double mid = 0.5 * (worst.a + worst.b);
    const Panel left = kronrod(f, worst.a, mid, result.evaluations);
    const Panel right = kronrod(f, mid, worst.b, result.evaluations);
    heap.push_back(left);
    std::push_heap(heap.begin(), heap.end());
    heap.push_back(right);
    std::push_heap(heap.begin(), heap.end());
    ++result.subdivisions;
    live_value += left.value + right.value - worst.value;
    live_error += left.error + right.error - worst.error;
    if (result.subdivisions % 64 == 0) {
      // Periodic exact re-sum bounds the drift of the incremental update.
      live_value = 0.0;
      live_error = 0.0;
      for (const Panel& p : heap) {
        live_value += p.value;
        live_error += p.error;
      }
    }
    total = live_value + retired_value;
    error = live_error + retired_error;
  }
  result.value = total;
  result.abs_error = error;
  return result;
}

QuadratureResult combine(const QuadratureResult& x, const QuadratureResult& y) {
  return QuadratureResult{x.value + y.value, x.abs_error + y.abs_error,
                          x.subdivisions + y.subdivisions, x.evaluations + y.evaluations};
}

QuadratureResult adaptive_semi_infinite(const std::function<double(double)>& f, double a,
                                        const QuadratureOptions& opt) {
  // x = a + e^s; integrand f(a + e^s) e^s decays on both sides for any f
  // that is finite at a and integrable at infinity.
  auto g = [&](double s) {
    const double w = std::exp(s);
    const double fx = f(a + w);
    return fx == 0.0 ? 0.0 : fx * w;
  };
  double lo = -4.0;
  double hi = 4.0;
  QuadratureOptions inner = opt;
  inner.left = inner.right = Endpoint::regular;
  QuadratureResult result = adaptive_finite(g, lo, hi, inner);
  const double tail_tol = 0.1 * opt.abs_tol;
  for (double width = 8.0; hi < 709.0; width *= 2.0) {
    const double next = std::min(hi + width, 709.0);
    const QuadratureResult panel = adaptive_finite(g, hi, next, inner);
    result = combine(result, panel);
    hi = next;
    if (std::abs(panel.value) < tail_tol) break;
  }
  for (double width = 8.0; lo > -745.0; width *= 2.0) {
    const double next = std::max(lo - width, -745.0);
    const QuadratureResult panel = adaptive_finite(g, next, lo, inner);
    result = combine(result, panel);
    lo = next;
    if (std::abs(panel.value) < tail_tol) break;
  }
  return result;
}

}  // namespace

QuadratureResult integrate_adaptive(const std::function<double(double)>& f, double a, double b,
                                    const QuadratureOptions& options) {
  if (std::isnan(a) || std::isnan(b)) throw DomainError("integration limits must not be NaN");
  if (b < a) {
    QuadratureResult r = integrate_adaptive(f, b, a, options);
    r.value = -r.value;
    return r;
  }
  if (std::isinf(a)) throw DomainError("lower integration limit must be finite");
  if (std::isinf(b)) return adaptive_semi_infinite(f, a, options);

  const bool left_sqrt = options.left == Endpoint::inverse_sqrt;
  const bool right_sqrt = options.right == Endpoint::inverse_sqrt;
  QuadratureOptions plain = options;
  plain.left = plain.right = Endpoint::regular;
  if (!left_sqrt && !right_sqrt) return adaptive_finite(f, a, b, plain);

  if (left_sqrt && right_sqrt) {
    const double mid = 0.5 * (a + b);
    QuadratureOptions half = options;
    half.abs_tol = 0.5 * options.abs_tol;
    half.right = Endpoint::regular;
    const QuadratureResult lower = integrate_adaptive(f, a, mid, half);
    half.left = Endpoint::regular;
    half.right = Endpoint::inverse_sqrt;
    const QuadratureResult upper = integrate_adaptive(f, mid, b, half);
    return combine(lower, upper);
  }
  const double span = std::sqrt(b - a);
  if (left_sqrt) {
    // x = a + w², dx = 2w dw
    auto g = [&](double w) { return 2.0 * w * f(a + w * w); };
    return adaptive_finite(g, 0.0, span, plain);
  }
  // x = b − w²
  auto g = [&](double w) { return 2.0 * w * f(b - w * w); };
  return adaptive_finite(g, 0.0, span, plain);
}

double integrate_fixed(const std::function<double(double)>& f, double a, double b) {
  int evals = 0;
  return kronrod(f, a, b, evals).value;
}

}  // namespace resbg

namespace resbg {

QuadratureResult integrate_with_breaks(const std::function<double(double)>& f, double a, double b,
                                       std::span<const double> breaks,
                                       const QuadratureOptions& options) {
  if (!(a < b) || !std::isfinite(a) || !std::isfinite(b)) {
    throw DomainError("integrate_with_breaks needs finite a < b");
  }
  QuadratureOptions plain = options;
  plain.left = plain.right = Endpoint::regular;
  return adaptive_finite(f, a, b, plain, breaks);
}

}  // namespace resbg
