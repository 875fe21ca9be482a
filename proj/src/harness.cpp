#include "resbg/harness.hpp"

#include "resbg/analytic.hpp"
#include "resbg/error.hpp"
#include "resbg/io.hpp"
#include "resbg/quadrature.hpp"

#include <chrono>
#include <cmath>
#include <ctime>
#include <filesystem>
#include <fstream>

namespace resbg {

namespace {

std::string utc_timestamp() {
  const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

nlohmann::json moments_json(const stats::Moments& m) {
  return {{"n", m.n},
          {"mean", m.mean},
          {"mean_se", m.mean_se},
          {"variance", m.variance},
          {"variance_se", m.variance_se}};
}

nlohmann::json params_json(const ControlParams& p) {
  return {{"eta", p.eta}, {"gamma", p.gamma}, {"t0", p.t0}, {"r0", p.r0}, {"phi", p.phi}};
}

void add_criterion(ComparisonReport& r, const std::map<std::string, double>& thresholds,
                   const std::string& key, const std::string& name, double value) {
  const auto it = thresholds.find(key);
  if (it == thresholds.end()) return;
  r.criteria.push_back({name, value, it->second, value <= it->second});
}

P0Model resolve_p0(const CompareOptions& o) {
  if (o.p0_model) return *o.p0_model;
  switch (o.p0_kind) {
    case P0Kind::weak_asymptotic:
      return P0Model::weak(o.params.gamma);
    case P0Kind::strong_asymptotic:
      return P0Model::strong(o.params.gamma);
    case P0Kind::empirical:
      break;
  }
  return calibrate_p0(o.params.gamma, o.ensemble.n_levels, calibration_seed(o.ensemble.seed),
                      o.calib_samples, o.jobs);
}

void compare_means(const CompareOptions& o, const std::vector<ScatteringPoint>& points,
                   ComparisonReport& r) {
  const MeanAmplitudes mean = mean_amplitudes(o.params);
  const std::pair<const char*, double> parts[] = {
      {"t_re", mean.t},        {"t_im", 0.0},      {"rp_re", mean.r_plus},
      {"rp_im", 0.0},          {"rm_re", mean.r_minus}, {"rm_im", 0.0}};
  std::vector<double> values(points.size());
  for (const auto& [name, expected] : parts) {
    const std::string key = name;
    for (std::size_t i = 0; i < points.size(); ++i) {
      const auto& p = points[i];
      const Complex c = key[0] == 't' ? p.t : (key[1] == 'p' ? p.r_plus : p.r_minus);
      values[i] = key.ends_with("re") ? c.real() : c.imag();
    }
    const stats::Moments m = stats::moments(values);
    r.sample_moments[key] = m;
    r.analytic_values[key] = expected;
    add_criterion(r, o.thresholds, "se_band", "mean_" + key + "_in_se_band",
                  std::abs(m.mean - expected) / m.mean_se);
  }
}

void compare_gaussian_limit(const CompareOptions& o, const std::vector<ScatteringPoint>& points,
                            ComparisonReport& r) {
  const auto g = analytic::gaussian_limit_params(o.params.eta, o.params.gamma);
  std::vector<double> sqrt_t(points.size());
  std::vector<double> theta(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    sqrt_t[i] = std::sqrt(points[i].T);
    theta[i] = points[i].theta_T;
  }
  const stats::Moments ms = stats::moments(sqrt_t);
  const stats::Moments mt = stats::moments(theta);
  r.sample_moments["sqrt_T"] = ms;
  r.sample_moments["theta_T"] = mt;
  r.analytic_values["mean_t"] = g.mean_t;
  r.analytic_values["sigma2_T"] = g.sigma2_T;
  r.analytic_values["sigma2_theta"] = g.sigma2_theta;
  r.analytic_values["var_ratio_sqrt_T"] = ms.variance / g.sigma2_T;
  r.analytic_values["var_ratio_theta"] = mt.variance / g.sigma2_theta;
  add_criterion(r, o.thresholds, "var_rel_tol", "var_sqrt_T_ratio",
                std::abs(ms.variance / g.sigma2_T - 1.0));
  add_criterion(r, o.thresholds, "var_rel_tol", "var_theta_ratio",
                std::abs(mt.variance / g.sigma2_theta - 1.0));
}

void compare_1d(const CompareOptions& o, const BoundFormula& f,
                const std::vector<ScatteringPoint>& points, Comparison& c) {
  ComparisonReport& r = c.report;
  const Variable var = f.info().variables[0];
  std::vector<double> values(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) values[i] = observable(points[i], var);
  const auto [lo, hi] = f.support();
  c.histogram = stats::histogram(values, lo, hi, o.bins_1d);
  c.grid = tabulate(f, GridAxis{lo, hi, o.bins_1d}, o.jobs);
  auto density = [&](double x) { return f(x); };
  const stats::TabulatedCdf cdf(density, lo, hi, o.cdf_cells, f.info().singular_left,
                                f.info().singular_right);
  r.ks_statistic = stats::ks_distance(values, [&](double x) { return cdf(x); });
  const double tol = f.info().needs_p0 ? 1e-7 : 1e-9;
  r.normalization = normalization(f, tol);
  r.l1_distance = stats::l1_distance(*c.histogram, density);
  r.sample_moments[to_string(var)] = stats::moments(values);

  QuadratureOptions q;
  q.abs_tol = tol;
  q.left = f.info().singular_left ? Endpoint::inverse_sqrt : Endpoint::regular;
  q.right = f.info().singular_right ? Endpoint::inverse_sqrt : Endpoint::regular;
  const double m1 = integrate_adaptive([&](double x) { return x * f(x); }, lo, hi, q).value;
  const double m2 = integrate_adaptive([&](double x) { return x * x * f(x); }, lo, hi, q).value;
  const double norm = *r.normalization;
  r.analytic_values["mean"] = m1 / norm;
  r.analytic_values["variance"] = m2 / norm - (m1 / norm) * (m1 / norm);
  r.analytic_values["cdf_total"] = cdf.total();
  r.metadata["histogram"] = {{"lo", lo}, {"hi", hi}, {"bins", o.bins_1d},
                             {"underflow", c.histogram->underflow},
                             {"overflow", c.histogram->overflow}};

  add_criterion(r, o.thresholds, "ks_max", "ks", *r.ks_statistic);
  if (!f.info().asymptotic) {
    add_criterion(r, o.thresholds, "norm_tol", "normalization", std::abs(norm - 1.0));
  }
}

void compare_2d(const CompareOptions& o, const BoundFormula& f,
                const std::vector<ScatteringPoint>& points, Comparison& c) {
  ComparisonReport& r = c.report;
  const Variable vx = f.info().variables[0];
  const Variable vy = f.info().variables[1];
  std::vector<double> xs(points.size());
  std::vector<double> ys(points.size());
  for (std::size_t i = 0; i < points.size(); ++i) {
    xs[i] = observable(points[i], vx);
    ys[i] = observable(points[i], vy);
  }
  c.histogram2d = stats::histogram2d(xs, ys, o.bins_2d, o.bins_2d);
  const auto& h = *c.histogram2d;
  c.grid = tabulate(f, GridAxis{h.x_lo, h.x_hi, h.nx}, GridAxis{h.y_lo, h.y_hi, h.ny}, o.jobs);
  r.l1_distance = stats::l1_distance(h, [&](double x, double y) { return f(x, y); });
  r.sample_moments[to_string(vx)] = stats::moments(xs);
  r.sample_moments[to_string(vy)] = stats::moments(ys);
  r.metadata["histogram"] = {{"x_lo", h.x_lo}, {"x_hi", h.x_hi}, {"y_lo", h.y_lo},
                             {"y_hi", h.y_hi}, {"nx", h.nx},     {"ny", h.ny}};
  add_criterion(r, o.thresholds, "l1_max", "l1", *r.l1_distance);
}

}  // namespace

double observable(const ScatteringPoint& p, Variable v) {
  switch (v) {
    case Variable::T:
      return p.T;
    case Variable::R_plus:
      return p.R_plus;
    case Variable::R_minus:
      return p.R_minus;
    case Variable::theta_T:
      return p.theta_T;
    case Variable::rho:
      return p.rho;
  }
  return 0.0;
}

std::uint64_t calibration_seed(std::uint64_t seed) { return rmt::derive_seed(seed, 0xCA11B7A7EULL); }

P0Model calibrate_p0(double gamma, int n_levels, std::uint64_t seed, std::size_t n_samples,
                     int jobs) {
  rmt::EnsembleConfig cfg;
  cfg.n_levels = n_levels;
  cfg.gamma = gamma;
  cfg.sampler = rmt::Sampler::tridiagonal_beta1;
  cfg.seed = seed;
  cfg.n_samples = n_samples;
  const auto samples = rmt::sample_stream(cfg, jobs);
  std::vector<double> xs;
  xs.reserve(samples.size());
  for (const auto& s : samples) xs.push_back(s.x());
  return p0_empirical_build(xs, gamma, seed);
}

std::string compare_ids() {
  return formula_ids() + ", " + kMeanAmplitudes + ", " + kGaussianLimit;
}

bool ComparisonReport::passed() const {
  for (const auto& c : criteria) {
    if (!c.passed) return false;
  }
  return true;
}

nlohmann::json ComparisonReport::to_json(bool with_timestamp) const {
  nlohmann::json j;
  j["formula_id"] = formula_id;
  j["ks_statistic"] = ks_statistic ? nlohmann::json(*ks_statistic) : nlohmann::json();
  j["l1_distance"] = l1_distance ? nlohmann::json(*l1_distance) : nlohmann::json();
  j["normalization"] = normalization ? nlohmann::json(*normalization) : nlohmann::json();
  j["sample_moments"] = nlohmann::json::object();
  for (const auto& [k, m] : sample_moments) j["sample_moments"][k] = moments_json(m);
  j["analytic"] = analytic_values;
  j["criteria"] = nlohmann::json::array();
  for (const auto& c : criteria) {
    j["criteria"].push_back(
        {{"name", c.name}, {"value", c.value}, {"threshold", c.threshold}, {"passed", c.passed}});
  }
  j["passed"] = passed();
  j["metadata"] = metadata;
  if (with_timestamp) j["timestamp"] = timestamp;
  return j;
}

Comparison compare(const CompareOptions& options, std::span<const rmt::GreensSample> samples) {
  const bool special = options.formula_id == kMeanAmplitudes || options.formula_id == kGaussianLimit;
  if (!special) formula_info(options.formula_id);

  Comparison c;
  ComparisonReport& r = c.report;
  r.formula_id = options.formula_id;
  r.timestamp = utc_timestamp();
  r.metadata["params"] = params_json(options.params);

  rmt::EnsembleConfig ens = options.ensemble;
  ens.gamma = options.params.gamma;
  std::vector<rmt::GreensSample> drawn;
  if (samples.empty()) {
    drawn = rmt::sample_stream(ens, options.jobs);
    samples = drawn;
    r.metadata["ensemble"] = ensemble_manifest(ens);
  } else {
    r.metadata["ensemble"] = {{"source", "external"}, {"n_samples", samples.size()}};
  }
  std::vector<ScatteringPoint> points(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) points[i] = evaluate(samples[i], options.params);

  if (options.formula_id == kMeanAmplitudes) {
    compare_means(options, points, r);
    return c;
  }
  if (options.formula_id == kGaussianLimit) {
    compare_gaussian_limit(options, points, r);
    return c;
  }

  const FormulaInfo& info = formula_info(options.formula_id);
  if (info.needs_p0) {
    if (!(options.params.gamma > 0.0)) {
      throw InvalidSpec("formula '" + info.id + "' needs γ > 0; use the zero-absorption formulas");
    }
    c.p0 = resolve_p0(options);
    r.metadata["p0"] = {{"kind", to_string(c.p0->kind())}};
    if (const auto* e = c.p0->empirical_payload()) {
      r.metadata["p0"]["n_calib"] = e->n_calib;
      r.metadata["p0"]["seed"] = e->seed;
      r.metadata["p0"]["s_tail"] = e->s_tail;
    }
  }
  const BoundFormula f(info.id, options.params, c.p0);
  r.metadata["asymptotic"] = info.asymptotic;
  if (f.dims() == 1) {
    compare_1d(options, f, points, c);
  } else {
    compare_2d(options, f, points, c);
  }
  return c;
}

void write_comparison(const std::string& dir, const Comparison& c) {
  std::filesystem::create_directories(dir);
  write_json((std::filesystem::path(dir) / "report.json").string(), c.report.to_json());
  if (c.grid) write_grid(dir, "grid", *c.grid);
  const auto path = (std::filesystem::path(dir) / "histogram.csv").string();
  if (c.histogram) {
    std::ofstream out(path);
    out.precision(17);
    out << "lo,hi,count,density,error\n";
    const auto d = c.histogram->densities();
    const auto e = c.histogram->density_errors();
    for (std::size_t i = 0; i < c.histogram->n_bins(); ++i) {
      out << c.histogram->edges[i] << ',' << c.histogram->edges[i + 1] << ','
          << c.histogram->counts[i] << ',' << d[i] << ',' << e[i] << '\n';
    }
  } else if (c.histogram2d) {
    const auto& h = *c.histogram2d;
    std::ofstream out(path);
    out.precision(17);
    out << "x,y,count,density\n";
    for (int i = 0; i < h.nx; ++i) {
      for (int j = 0; j < h.ny; ++j) {
        out << h.x_lo + (i + 0.5) * h.dx() << ',' << h.y_lo + (j + 0.5) * h.dy() << ','
            << h.count(i, j) << ',' << h.density(i, j) << '\n';
      }
    }
  }
}

}  // namespace resbg
