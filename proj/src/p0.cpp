#include "resbg/p0.hpp"

#include "resbg/error.hpp"
#include "resbg/scales.hpp"

#include <algorithm>
#include <cmath>

namespace resbg {

namespace {

void require_gamma(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma)) {
    throw DomainError(
        "P0 models need γ > 0; at γ = 0 use the zero-absorption closed forms instead");
  }
}

void require_x(double x) {
  if (!(x >= 1.0)) throw DomainError("P0(x) is only defined for x ≥ 1");
}

double log_p0_weak(double x, double gamma) {
  const double a = gamma / 4.0;
  return std::log(2.0 / std::sqrt(kPi)) + 1.5 * std::log(a) + 0.5 * std::log(x + 1.0) -
         a * (x + 1.0);
}

}  // namespace

std::string to_string(P0Kind kind) {
  switch (kind) {
    case P0Kind::weak_asymptotic:
      return "weak_asymptotic";
    case P0Kind::strong_asymptotic:
      return "strong_asymptotic";
    case P0Kind::empirical:
      return "empirical";
  }
  return "unknown";
}

P0Kind p0_kind_from_string(std::string_view name) {
  if (name == "weak" || name == "weak_asymptotic") return P0Kind::weak_asymptotic;
  if (name == "strong" || name == "strong_asymptotic") return P0Kind::strong_asymptotic;
  if (name == "empirical") return P0Kind::empirical;
  throw DomainError("unknown P0 kind '" + std::string(name) + "'");
}

double p0_weak(double x, double gamma) {
  require_gamma(gamma);
  require_x(x);
  const double a = gamma / 4.0;
  return 2.0 / std::sqrt(kPi) * a * std::sqrt(a) * std::sqrt(x + 1.0) * std::exp(-a * (x + 1.0));
}

double p0_strong(double x, double gamma) {
  require_gamma(gamma);
  require_x(x);
  const double a = gamma / 4.0;
  return a * std::exp(-a * (x - 1.0));
}

P0Model P0Model::weak(double gamma) {
  require_gamma(gamma);
  return P0Model(P0Kind::weak_asymptotic, gamma);
}

P0Model P0Model::strong(double gamma) {
  require_gamma(gamma);
  return P0Model(P0Kind::strong_asymptotic, gamma);
}

P0Model P0Model::empirical(EmpiricalP0 payload, double gamma) {
  require_gamma(gamma);
  if (payload.bin_edges.size() < 3 || payload.densities.size() + 1 != payload.bin_edges.size()) {
    throw DomainError("empirical P0 payload needs matching bin_edges/densities");
  }
  if (payload.bin_edges.front() != 1.0 || !(payload.s_tail > 0.0) || !(payload.a_tail > 0.0)) {
    throw DomainError("empirical P0 payload is malformed");
  }
  P0Model m(P0Kind::empirical, gamma);
  m.payload_ = std::move(payload);
  m.build_nodes();
  return m;
}

void P0Model::build_nodes() {
  const auto& e = payload_.bin_edges;
  const auto& d = payload_.densities;
  node_x_.clear();
  node_y_.clear();
  node_x_.push_back(1.0);
  node_y_.push_back(d[0]);
  for (std::size_t k = 1; k < d.size(); ++k) {
    node_x_.push_back(1.0 + std::sqrt((e[k] - 1.0) * (e[k + 1] - 1.0)));
    node_y_.push_back(d[k]);
  }
  node_x_.push_back(payload_.x_cut);
  node_y_.push_back(payload_.a_tail * std::exp(-payload_.s_tail * payload_.x_cut));
}

double P0Model::density(double x) const {
  require_x(x);
  switch (kind_) {
    case P0Kind::weak_asymptotic:
      return p0_weak(x, gamma_);
    case P0Kind::strong_asymptotic:
      return p0_strong(x, gamma_);
    case P0Kind::empirical:
      break;
  }
  if (x >= payload_.x_cut) return payload_.a_tail * std::exp(-payload_.s_tail * x);
  const auto it = std::upper_bound(node_x_.begin(), node_x_.end(), x);
  const auto hi = static_cast<std::size_t>(it - node_x_.begin());
  const std::size_t lo = hi - 1;
  const double w = (x - node_x_[lo]) / (node_x_[hi] - node_x_[lo]);
  return node_y_[lo] + w * (node_y_[hi] - node_y_[lo]);
}

double P0Model::peak() const {
  switch (kind_) {
    case P0Kind::weak_asymptotic:
      return p0_weak(std::max(1.0, 2.0 / gamma_ - 1.0), gamma_);
    case P0Kind::strong_asymptotic:
      return gamma_ / 4.0;
    case P0Kind::empirical:
      return *std::max_element(node_y_.begin(), node_y_.end());
  }
  return 0.0;
}

double P0Model::upper_cutoff(double rel) const {
  const double drop = -std::log(rel);
  switch (kind_) {
    case P0Kind::strong_asymptotic:
      return 1.0 + 4.0 * drop / gamma_;
    case P0Kind::weak_asymptotic: {
      // log-density is concave beyond its maximum: bisect for the crossing.
      const double x_peak = std::max(1.0, 2.0 / gamma_ - 1.0);
      const double target = log_p0_weak(x_peak, gamma_) - drop;
      double lo = x_peak;
      double hi = x_peak + 4.0 * (drop + 10.0) / gamma_;
      while (log_p0_weak(hi, gamma_) > target) hi = x_peak + 2.0 * (hi - x_peak);
      for (int i = 0; i < 200 && hi - lo > 1e-12 * hi; ++i) {
        const double mid = 0.5 * (lo + hi);
        (log_p0_weak(mid, gamma_) > target ? lo : hi) = mid;
      }
      return hi;
    }
    case P0Kind::empirical: {
      const double x = (std::log(payload_.a_tail) - std::log(rel * peak())) / payload_.s_tail;
      return std::max(payload_.x_cut, x);
    }
  }
  return 1.0;
}

double P0Model::normalization() const {
  switch (kind_) {
    case P0Kind::strong_asymptotic:
      return 1.0;
    case P0Kind::weak_asymptotic: {
      // ∫₁^∞ = Γ(3/2, γ/2)/Γ(3/2) = erfc(√y) + 2√(y/π) e^{−y}, y = γ/2.
      const double y = gamma_ / 2.0;
      return std::erfc(std::sqrt(y)) + 2.0 * std::sqrt(y / kPi) * std::exp(-y);
    }
    case P0Kind::empirical:
      break;
  }
  double total = 0.0;
  for (std::size_t k = 0; k + 1 < node_x_.size(); ++k) {
    total += 0.5 * (node_y_[k] + node_y_[k + 1]) * (node_x_[k + 1] - node_x_[k]);
  }
  total += payload_.a_tail / payload_.s_tail * std::exp(-payload_.s_tail * payload_.x_cut);
  return total;
}

nlohmann::json P0Model::to_json() const {
  nlohmann::json j;
  j["kind"] = to_string(kind_);
  j["gamma"] = gamma_;
  if (kind_ == P0Kind::empirical) {
    j["bin_edges"] = payload_.bin_edges;
    j["densities"] = payload_.densities;
    j["x_cut"] = payload_.x_cut;
    j["s_tail"] = payload_.s_tail;
    j["a_tail"] = payload_.a_tail;
    j["n_calib"] = payload_.n_calib;
    j["seed"] = payload_.seed;
  }
  return j;
}

P0Model P0Model::from_json(const nlohmann::json& j) {
  const P0Kind kind = p0_kind_from_string(j.at("kind").get<std::string>());
  const double gamma = j.at("gamma").get<double>();
  switch (kind) {
    case P0Kind::weak_asymptotic:
      return weak(gamma);
    case P0Kind::strong_asymptotic:
      return strong(gamma);
    case P0Kind::empirical:
      break;
  }
  EmpiricalP0 p;
  p.bin_edges = j.at("bin_edges").get<std::vector<double>>();
  p.densities = j.at("densities").get<std::vector<double>>();
  p.x_cut = j.at("x_cut").get<double>();
  p.s_tail = j.at("s_tail").get<double>();
  p.a_tail = j.at("a_tail").get<double>();
  p.n_calib = j.at("n_calib").get<std::size_t>();
  p.seed = j.at("seed").get<std::uint64_t>();
  return empirical(std::move(p), gamma);
}

P0Model p0_empirical_build(std::span<const double> x_samples, double gamma, std::uint64_t seed) {
  require_gamma(gamma);
  const std::size_t n = x_samples.size();
  if (n < kMinCalibrationSamples) {
    throw CalibrationError("empirical P0 needs at least " +
                               std::to_string(kMinCalibrationSamples) + " samples, got " +
                               std::to_string(n),
                           kMinCalibrationSamples);
  }
  std::vector<double> sorted(x_samples.begin(), x_samples.end());
  for (double x : sorted) {
    if (!(x >= 1.0) || !std::isfinite(x)) {
      throw DomainError("calibration samples must be finite and ≥ 1");
    }
  }
  std::sort(sorted.begin(), sorted.end());
  auto quantile = [&](double p) {
    return sorted[static_cast<std::size_t>(p * static_cast<double>(n - 1))];
  };
  const double x_lo = quantile(0.001);
  const double x_fit = quantile(0.90);
  const double x_cut = quantile(0.99);
  if (!(x_lo > 1.0) || !(x_cut > x_lo)) {
    throw CalibrationError("calibration samples are degenerate (no spread in x)", n);
  }

  EmpiricalP0 p;
  p.x_cut = x_cut;
  p.n_calib = n;
  p.seed = seed;
  p.bin_edges.push_back(1.0);
  const double log_lo = std::log(x_lo - 1.0);
  const double log_hi = std::log(x_cut - 1.0);
  for (int k = 0; k <= kEmpiricalLogBins; ++k) {
    p.bin_edges.push_back(1.0 + std::exp(log_lo + (log_hi - log_lo) * k / kEmpiricalLogBins));
  }
  p.bin_edges.back() = x_cut;
  const std::size_t n_bins = p.bin_edges.size() - 1;
  p.counts.assign(n_bins, 0.0);
  for (double x : sorted) {
    if (x >= x_cut) break;
    const auto it = std::upper_bound(p.bin_edges.begin(), p.bin_edges.end(), x);
    const auto bin = static_cast<std::size_t>(it - p.bin_edges.begin()) - 1;
    p.counts[std::min(bin, n_bins - 1)] += 1.0;
  }
  p.densities.resize(n_bins);
  for (std::size_t k = 0; k < n_bins; ++k) {
    p.densities[k] =
        p.counts[k] / (static_cast<double>(n) * (p.bin_edges[k + 1] - p.bin_edges[k]));
  }

  // Least squares of log-density against the bin centre over [q90, q99].
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t k = 1; k < n_bins; ++k) {
    const double centre = 1.0 + std::sqrt((p.bin_edges[k] - 1.0) * (p.bin_edges[k + 1] - 1.0));
    if (centre < x_fit || p.counts[k] <= 0.0) continue;
    const double y = std::log(p.densities[k]);
    sx += centre;
    sy += y;
    sxx += centre * centre;
    sxy += centre * y;
    ++m;
  }
  if (m < 3) throw CalibrationError("too few occupied tail bins for the exponential fit", n);
  const double slope = (m * sxy - sx * sy) / (m * sxx - sx * sx);
  const double intercept = (sy - slope * sx) / m;
  if (!(slope < 0.0)) throw CalibrationError("tail fit did not produce a decaying exponential", n);
  p.s_tail = -slope;
  p.a_tail = std::exp(intercept);

  P0Model model = P0Model::empirical(p, gamma);
  const double total = model.normalization();
  for (double& d : p.densities) d /= total;
  p.a_tail /= total;
  return P0Model::empirical(std::move(p), gamma);
}

double p0_eval(const P0Model& model, double x) { return model.density(x); }

}  // namespace resbg
