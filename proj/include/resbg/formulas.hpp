#pragma once

#include "resbg/p0.hpp"
#include "resbg/scales.hpp"

#include <json.hpp>

#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace resbg {

/// Which ScatteringPoint field a density variable refers to.
enum class Variable { T, R_plus, R_minus, theta_T, rho };

std::string to_string(Variable v);

/// Static description of one tabulatable density.
struct FormulaInfo {
  std::string id;
  std::string description;
  std::vector<Variable> variables;  // 1 or 2 axes
  bool needs_p0 = false;            // exact representation over a P0Model
  bool asymptotic = false;          // approximate closed form; never an exact reference
  bool zero_absorption = false;     // requires γ = 0 statistics
  bool perfect_coupling_only = false;
  // Default support per axis.
  std::vector<std::pair<double, double>> support;
  // Integrable inverse-square-root blowups at the support edges (1D only).
  bool singular_left = false;
  bool singular_right = false;
};

/// All registered formulas, in a fixed order.
const std::vector<FormulaInfo>& formula_registry();

/// Throws InvalidSpec listing the valid ids when `id` is unknown.
const FormulaInfo& formula_info(const std::string& id);

/// Comma-separated list of registered ids.
std::string formula_ids();

/// A density bound to parameters and (optionally) a P0 model.
///
/// Transmission variables are rescaled for t0 < 1: P(T) = P'(T/t0²)/t0².
/// Throws InvalidSpec when the combination is inconsistent (a P0-based
/// formula without a model, a γ = 0 formula with γ > 0, ...).
class BoundFormula {
 public:
  BoundFormula(const std::string& id, const ControlParams& params,
               std::optional<P0Model> p0 = std::nullopt);

  const FormulaInfo& info() const { return *info_; }
  const ControlParams& params() const { return params_; }
  const std::optional<P0Model>& p0() const { return p0_; }
  int dims() const { return static_cast<int>(info_->variables.size()); }

  double operator()(double x) const;
  double operator()(double x, double y) const;

  /// Support of axis k after t0 rescaling.
  std::pair<double, double> support(int axis = 0) const;

 private:
  double raw1(double x) const;
  double raw2(double x, double y) const;

  const FormulaInfo* info_;
  ControlParams params_;
  std::optional<P0Model> p0_;
};

/// Grid axis "lo:hi:n": n cells of equal width, tabulated at cell midpoints.
struct GridAxis {
  double lo = 0.0;
  double hi = 1.0;
  int n = 100;

  std::vector<double> points() const;
  double width() const { return (hi - lo) / n; }
  std::string spec() const;
  /// Parses "lo:hi:n"; throws InvalidSpec on malformed input.
  static GridAxis parse(const std::string& spec);
};

struct PdfGrid {
  std::string formula_id;
  std::vector<std::string> variables;
  std::vector<double> x;
  std::vector<double> y;        // empty for 1D
  std::vector<double> density;  // 1D: x.size(); 2D: row-major, x outer
  nlohmann::json metadata;      // formula_id, eta, gamma, t0, r0, p0_kind, grid_spec, asymptotic

  int dims() const { return y.empty() ? 1 : 2; }
  double at(std::size_t i, std::size_t j) const { return density[i * y.size() + j]; }
  /// Midpoint-rule integral over the tabulated cells.
  double cell_sum() const;
};

/// Tabulates a 1D formula on `x` (parallel over abscissae; deterministic).
PdfGrid tabulate(const BoundFormula& f, const GridAxis& x, int jobs = 0);
/// Tabulates a 2D formula on x × y.
PdfGrid tabulate(const BoundFormula& f, const GridAxis& x, const GridAxis& y, int jobs = 0);

/// ∫ f over its support by adaptive quadrature (1D only).
double normalization(const BoundFormula& f, double abs_tol = 1e-9);

}  // namespace resbg
