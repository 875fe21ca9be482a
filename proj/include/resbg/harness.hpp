#pragma once

#include "resbg/formulas.hpp"
#include "resbg/observables.hpp"
#include "resbg/p0.hpp"
#include "resbg/rmt.hpp"
#include "resbg/stats.hpp"

#include <json.hpp>

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace resbg {

/// Value of one density variable on a scattering point.
double observable(const ScatteringPoint& p, Variable v);

/// Empirical P0 from a fresh tridiagonal stream of `n_samples` draws.
P0Model calibrate_p0(double gamma, int n_levels, std::uint64_t seed,
                     std::size_t n_samples = 1'000'000, int jobs = 0);

/// Seed of the calibration stream that belongs to a comparison seed.
std::uint64_t calibration_seed(std::uint64_t seed);

/// Comparison ids that are not densities.
inline constexpr const char* kMeanAmplitudes = "mean_amplitudes";
inline constexpr const char* kGaussianLimit = "gaussian_limit";

/// Valid ids for compare(): the formula registry plus the moment checks.
std::string compare_ids();

struct CompareOptions {
  ControlParams params;
  std::string formula_id;
  P0Kind p0_kind = P0Kind::empirical;
  std::optional<P0Model> p0_model;  // used as is when given
  std::size_t calib_samples = 1'000'000;
  rmt::EnsembleConfig ensemble;  // γ is taken from params
  int bins_1d = 100;
  int bins_2d = 50;
  int cdf_cells = 1000;
  int jobs = 0;
  // Named pass thresholds: ks_max, l1_max, norm_tol, se_band.
  std::map<std::string, double> thresholds;
};

struct CriterionResult {
  std::string name;
  double value = 0.0;
  double threshold = 0.0;
  bool passed = false;
};

struct ComparisonReport {
  std::string formula_id;
  std::optional<double> ks_statistic;
  std::optional<double> l1_distance;
  std::optional<double> normalization;
  std::map<std::string, stats::Moments> sample_moments;
  std::map<std::string, double> analytic_values;
  std::vector<CriterionResult> criteria;
  nlohmann::json metadata;
  std::string timestamp;

  bool passed() const;
  nlohmann::json to_json(bool with_timestamp = true) const;
};

struct Comparison {
  ComparisonReport report;
  std::optional<PdfGrid> grid;
  std::optional<stats::Histogram> histogram;
  std::optional<stats::Histogram2D> histogram2d;
  std::optional<P0Model> p0;
};

/// MC-vs-analytic comparison. Samples are drawn from options.ensemble
/// unless `samples` is nonempty (then they are used as given). The P0 model
/// for exact formulas is options.p0_model, or built from p0_kind; an
/// empirical model is calibrated on an independent stream.
Comparison compare(const CompareOptions& options,
                   std::span<const rmt::GreensSample> samples = {});

/// Writes report.json, grid.csv/grid.json and histogram.csv into `dir`.
void write_comparison(const std::string& dir, const Comparison& c);

}  // namespace resbg
