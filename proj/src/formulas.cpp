#include "resbg/formulas.hpp"

#include "resbg/analytic.hpp"
#include "resbg/error.hpp"
#include "resbg/parallel.hpp"
#include "resbg/quadrature.hpp"

#include <cmath>
#include <sstream>

namespace resbg {

namespace {

constexpr double kHalfPi = 0.5 * kPi;

std::vector<FormulaInfo> build_registry() {
  using V = Variable;
  const std::pair<double, double> unit{0.0, 1.0};
  const std::pair<double, double> phase{-kHalfPi, kHalfPi};
  const std::pair<double, double> rigidity{-1.0, 1.0};
  std::vector<FormulaInfo> r;
  auto add = [&](FormulaInfo f) { r.push_back(std::move(f)); };
  add({"p_t", "transmission density, exact over P0", {V::T}, true, false, false, false, {unit}});
  add({"p_t0", "transmission density at zero absorption", {V::T}, false, false, true, false, {unit},
       true, true});
  add({"p_t_strong", "transmission density, strong-absorption closed form", {V::T}, false, true,
       false, false, {unit}});
  add({"p_r", "reflection density R+, exact over P0", {V::R_plus}, true, false, false, false,
       {unit}});
  add({"p_r_minus", "reflection density R-, exact over P0", {V::R_minus}, true, false, false,
       false, {unit}});
  add({"p_theta", "transmission phase density, exact over P0", {V::theta_T}, true, false, false,
       false, {phase}});
  add({"p_theta0", "transmission phase density at zero absorption", {V::theta_T}, false, false,
       true, false, {phase}});
  add({"p_theta_weak", "transmission phase density, weak-absorption form", {V::theta_T}, false,
       true, false, false, {phase}});
  add({"p_theta_strong", "transmission phase density, strong-absorption form", {V::theta_T},
       false, true, false, false, {phase}});
  add({"p_theta_gauss", "transmission phase, Gaussian limit N(0, sigma2_theta)", {V::theta_T},
       false, true, false, false, {phase}});
  add({"p_rho", "phase rigidity density, exact over P0", {V::rho}, true, false, false, false,
       {rigidity}, false, true});
  add({"p_rho0", "phase rigidity density at zero absorption", {V::rho}, false, false, true, false,
       {rigidity}, true, true});
  add({"joint_rt", "joint density of (R, T) at perfect coupling", {V::R_plus, V::T}, true, false,
       false, true, {unit, unit}});
  add({"joint_ttheta", "joint density of (T, theta), exact over P0", {V::T, V::theta_T}, true,
       false, false, false, {unit, phase}});
  add({"joint_ttheta_asym", "joint density of (T, theta), strong-absorption asymptotic",
       {V::T, V::theta_T}, false, true, false, false, {unit, phase}});
  add({"joint_ttheta_rice", "joint density of (T, theta), Rician approximation",
       {V::T, V::theta_T}, false, true, false, false, {unit, phase}});
  return r;
}

bool is_transmission(Variable v) { return v == Variable::T; }

}  // namespace

std::string to_string(Variable v) {
  switch (v) {
    case Variable::T:
      return "T";
    case Variable::R_plus:
      return "R_plus";
    case Variable::R_minus:
      return "R_minus";
    case Variable::theta_T:
      return "theta_T";
    case Variable::rho:
      return "rho";
  }
  return "?";
}

const std::vector<FormulaInfo>& formula_registry() {
  static const std::vector<FormulaInfo> registry = build_registry();
  return registry;
}

std::string formula_ids() {
  std::string out;
  for (const auto& f : formula_registry()) {
    if (!out.empty()) out += ", ";
    out += f.id;
  }
  return out;
}

const FormulaInfo& formula_info(const std::string& id) {
  for (const auto& f : formula_registry()) {
    if (f.id == id) return f;
  }
  throw InvalidSpec("unknown formula '" + id + "'; valid ids: " + formula_ids());
}

BoundFormula::BoundFormula(const std::string& id, const ControlParams& params,
                           std::optional<P0Model> p0)
    : info_(&formula_info(id)), params_(params), p0_(std::move(p0)) {
  if (!(params_.eta > 0.0)) throw InvalidSpec("formula '" + id + "' needs η > 0");
  if (info_->needs_p0) {
    if (params_.gamma == 0.0) {
      throw InvalidSpec("formula '" + id +
                        "' integrates over P0, which does not exist at γ = 0; use the "
                        "zero-absorption formulas (p_t0, p_theta0, p_rho0) instead");
    }
    if (!p0_) throw InvalidSpec("formula '" + id + "' needs a P0 model (--p0 weak|strong|empirical:<file>)");
    if (std::abs(p0_->gamma() - params_.gamma) > 1e-12 * std::max(1.0, params_.gamma)) {
      std::ostringstream os;
      os << "P0 model was built for γ = " << p0_->gamma() << " but the run uses γ = "
         << params_.gamma;
      throw InvalidSpec(os.str());
    }
  }
  if (info_->asymptotic && !(params_.gamma > 0.0)) {
    throw InvalidSpec("asymptotic formula '" + id + "' needs γ > 0");
  }
  if (info_->perfect_coupling_only && params_.r0 != 0.0) {
    throw InvalidSpec("formula '" + id + "' is only defined at perfect coupling (t0 = 1)");
  }
  for (Variable v : info_->variables) {
    if (is_transmission(v) && !(params_.t0 > 0.0)) {
      throw InvalidSpec("transmission densities need t0 > 0");
    }
  }
}

std::pair<double, double> BoundFormula::support(int axis) const {
  auto s = info_->support.at(static_cast<std::size_t>(axis));
  if (is_transmission(info_->variables.at(static_cast<std::size_t>(axis)))) {
    s.second *= params_.t0 * params_.t0;
  }
  return s;
}

double BoundFormula::raw1(double x) const {
  namespace a = analytic;
  const double eta = params_.eta;
  const double gamma = params_.gamma;
  const std::string& id = info_->id;
  if (id == "p_t") return a::transmission_pdf(x, eta, *p0_);
  if (id == "p_t0") return a::transmission_pdf_zero_absorption(x, eta);
  if (id == "p_t_strong") return a::strong_absorption_transmission_pdf(x, eta, gamma);
  if (id == "p_r") return a::reflection_pdf(x, eta, params_.r0, *p0_);
  if (id == "p_r_minus") return a::reflection_pdf(x, eta, -params_.r0, *p0_);
  if (id == "p_theta") return a::phase_pdf(x, eta, *p0_);
  if (id == "p_theta0") return a::phase_pdf_zero_absorption(x, eta);
  if (id == "p_theta_weak") return a::phase_pdf_weak(x, eta, gamma);
  if (id == "p_theta_strong") return a::phase_pdf_strong(x, eta, gamma);
  if (id == "p_theta_gauss") {
    const double s2 = a::gaussian_limit_params(eta, gamma).sigma2_theta;
    return std::exp(-x * x / (2.0 * s2)) / std::sqrt(2.0 * kPi * s2);
  }
  if (id == "p_rho") return a::phase_rigidity_pdf(x, eta, a::PhaseModel::exact(*p0_));
  if (id == "p_rho0") return a::phase_rigidity_pdf(x, eta, a::PhaseModel::zero_absorption());
  throw InvalidSpec("formula '" + id + "' is not one-dimensional");
}

double BoundFormula::raw2(double x, double y) const {
  namespace a = analytic;
  const double eta = params_.eta;
  const double gamma = params_.gamma;
  const std::string& id = info_->id;
  if (id == "joint_rt") return a::joint_rt_pdf(x, y, eta, *p0_);
  if (id == "joint_ttheta") return a::joint_ttheta_pdf(x, y, eta, *p0_);
  if (id == "joint_ttheta_asym") return a::joint_ttheta_asymptotic(x, y, eta, gamma);
  if (id == "joint_ttheta_rice") return a::joint_ttheta_rician(x, y, eta, gamma);
  throw InvalidSpec("formula '" + id + "' is not two-dimensional");
}

double BoundFormula::operator()(double x) const {
  if (dims() != 1) throw InvalidSpec("formula '" + info_->id + "' takes two variables");
  if (is_transmission(info_->variables[0])) {
    const double t2 = params_.t0 * params_.t0;
    return raw1(x / t2) / t2;
  }
  return raw1(x);
}

double BoundFormula::operator()(double x, double y) const {
  if (dims() != 2) throw InvalidSpec("formula '" + info_->id + "' takes one variable");
  double scale = 1.0;
  if (is_transmission(info_->variables[0])) {
    const double t2 = params_.t0 * params_.t0;
    x /= t2;
    scale /= t2;
  }
  if (is_transmission(info_->variables[1])) {
    const double t2 = params_.t0 * params_.t0;
    y /= t2;
    scale /= t2;
  }
  return scale * raw2(x, y);
}

std::vector<double> GridAxis::points() const {
  std::vector<double> p(static_cast<std::size_t>(n));
  const double h = width();
  for (int i = 0; i < n; ++i) p[static_cast<std::size_t>(i)] = lo + (i + 0.5) * h;
  return p;
}

std::string GridAxis::spec() const {
  std::ostringstream os;
  os.precision(17);
  os << lo << ':' << hi << ':' << n;
  return os.str();
}

GridAxis GridAxis::parse(const std::string& spec) {
  const auto c1 = spec.find(':');
  const auto c2 = c1 == std::string::npos ? c1 : spec.find(':', c1 + 1);
  if (c2 == std::string::npos) throw InvalidSpec("grid spec '" + spec + "' is not lo:hi:n");
  GridAxis g;
  try {
    std::size_t used = 0;
    g.lo = std::stod(spec.substr(0, c1), &used);
    g.hi = std::stod(spec.substr(c1 + 1, c2 - c1 - 1));
    const std::string count = spec.substr(c2 + 1);
    g.n = std::stoi(count, &used);
    if (used != count.size()) throw std::invalid_argument(count);
  } catch (const std::exception&) {
    throw InvalidSpec("grid spec '" + spec + "' is not lo:hi:n");
  }
  if (!(g.hi > g.lo) || g.n < 1) throw InvalidSpec("grid spec '" + spec + "' needs lo < hi, n ≥ 1");
  return g;
}

double PdfGrid::cell_sum() const {
  if (x.size() < 1) return 0.0;
  const double hx = x.size() > 1 ? x[1] - x[0] : 0.0;
  double total = 0.0;
  for (double d : density) total += d;
  if (y.empty()) return total * hx;
  const double hy = y.size() > 1 ? y[1] - y[0] : 0.0;
  return total * hx * hy;
}

namespace {

nlohmann::json grid_metadata(const BoundFormula& f, const std::string& grid_spec) {
  nlohmann::json m;
  m["formula_id"] = f.info().id;
  m["eta"] = f.params().eta;
  m["gamma"] = f.params().gamma;
  m["t0"] = f.params().t0;
  m["r0"] = f.params().r0;
  m["p0_kind"] = f.p0() ? to_string(f.p0()->kind()) : "none";
  m["grid_spec"] = grid_spec;
  m["asymptotic"] = f.info().asymptotic;
  return m;
}

}  // namespace

PdfGrid tabulate(const BoundFormula& f, const GridAxis& x, int jobs) {
  PdfGrid g;
  g.formula_id = f.info().id;
  g.variables = {to_string(f.info().variables[0])};
  g.x = x.points();
  g.density.assign(g.x.size(), 0.0);
  parallel_for(g.x.size(), jobs, [&](std::size_t i) { g.density[i] = f(g.x[i]); });
  g.metadata = grid_metadata(f, x.spec());
  return g;
}

PdfGrid tabulate(const BoundFormula& f, const GridAxis& x, const GridAxis& y, int jobs) {
  PdfGrid g;
  g.formula_id = f.info().id;
  g.variables = {to_string(f.info().variables[0]), to_string(f.info().variables[1])};
  g.x = x.points();
  g.y = y.points();
  g.density.assign(g.x.size() * g.y.size(), 0.0);
  const std::size_t ny = g.y.size();
  parallel_for(g.x.size(), jobs, [&](std::size_t i) {
    for (std::size_t j = 0; j < ny; ++j) g.density[i * ny + j] = f(g.x[i], g.y[j]);
  });
  g.metadata = grid_metadata(f, x.spec() + "," + y.spec());
  return g;
}

double normalization(const BoundFormula& f, double abs_tol) {
  if (f.dims() != 1) throw InvalidSpec("normalization is computed for 1D formulas only");
  const auto [lo, hi] = f.support();
  QuadratureOptions opt;
  opt.abs_tol = abs_tol;
  opt.left = f.info().singular_left ? Endpoint::inverse_sqrt : Endpoint::regular;
  opt.right = f.info().singular_right ? Endpoint::inverse_sqrt : Endpoint::regular;
  return integrate_adaptive([&](double x) { return f(x); }, lo, hi, opt).value;
}

}  // namespace resbg
