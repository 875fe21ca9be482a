#include "resbg/cli.hpp"

#include "resbg/error.hpp"
#include "resbg/formulas.hpp"
#include "resbg/harness.hpp"
#include "resbg/io.hpp"
#include "resbg/observables.hpp"
#include "resbg/parallel.hpp"
#include "resbg/rmt.hpp"
#include "resbg/scales.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <sstream>

#ifndef RESBG_CRITERIA_FILE
#define RESBG_CRITERIA_FILE "criteria/criteria_v1.json"
#endif

namespace resbg::cli {

namespace fs = std::filesystem;

namespace {

constexpr std::size_t kScanCellLimit = 16;
constexpr double kScanSampleLimit = 4e6;

struct ParamFlags {
  std::string eta = "1";
  std::string gamma = "1";
  std::optional<double> t0;
  std::optional<double> phi;
  int r0_sign = +1;
  std::string config;
};

struct EnsembleFlags {
  std::size_t n_samples = 100000;
  int matrix_size = 0;  // 0: recommended for γ
  std::string sampler = "tridiagonal";
  std::optional<std::uint64_t> seed;
  int jobs = 0;
};

std::vector<double> parse_list(const std::string& text, const std::string& flag) {
  std::vector<double> values;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    try {
      std::size_t used = 0;
      values.push_back(std::stod(item, &used));
      if (used != item.size()) throw std::invalid_argument(item);
    } catch (const std::exception&) {
      throw InvalidSpec("--" + flag + ": '" + item + "' is not a number");
    }
  }
  if (values.empty()) throw InvalidSpec("--" + flag + " needs at least one value");
  return values;
}

void add_param_flags(CLI::App* app, ParamFlags& p) {
  app->add_option("--eta", p.eta, "background coupling η (comma list fans out)");
  app->add_option("--gamma", p.gamma, "absorption rate γ (comma list fans out)");
  auto* t0 = app->add_option("--t0", p.t0, "direct transmission amplitude t0 ∈ [0,1]");
  auto* phi = app->add_option("--phi", p.phi, "channel-mixing angle φ ∈ [0, π/2]");
  t0->excludes(phi);
  app->add_option("--r0-sign", p.r0_sign, "sign of r0 when --t0 < 1")
      ->check(CLI::IsMember({-1, 1}));
  auto* cfg = app->add_option("--config", p.config,
                              "JSON file with a spec{...} or control{...} block");
  cfg->excludes(t0)->excludes(phi);
}

void add_ensemble_flags(CLI::App* app, EnsembleFlags& e) {
  app->add_option("--n-samples", e.n_samples, "number of Monte-Carlo samples")
      ->check(CLI::PositiveNumber);
  app->add_option("--matrix-size", e.matrix_size, "background size N (default: chosen from γ)");
  app->add_option("--sampler", e.sampler, "tridiagonal | dense");
  app->add_option("--seed", e.seed, "64-bit seed (random and recorded when omitted)");
  app->add_option("--jobs", e.jobs, "worker threads (0 = all cores)");
}

ControlParams params_from_json(const nlohmann::json& j) {
  if (j.contains("spec")) {
    const auto& s = j.at("spec");
    ResonanceSpec spec;
    spec.epsilon0 = s.value("epsilon0", 0.0);
    spec.channel_amplitudes = s.at("amplitudes").get<std::vector<double>>();
    spec.gamma_spread = s.at("gamma_spread").get<double>();
    spec.gamma_abs = s.at("gamma_abs").get<double>();
    spec.level_spacing = s.at("level_spacing").get<double>();
    return control_params(spec);
  }
  if (j.contains("control")) {
    const auto& c = j.at("control");
    const double eta = c.at("eta").get<double>();
    const double gamma = c.at("gamma").get<double>();
    if (c.contains("phi")) return ControlParams::from_phi(eta, gamma, c.at("phi").get<double>());
    return ControlParams::from_t0(eta, gamma, c.value("t0", 1.0), c.value("r0_sign", 1));
  }
  throw InvalidSpec("config needs a 'spec' or 'control' block");
}

// One (η, γ) combination per fan-out cell, η varying fastest.
std::vector<ControlParams> expand_params(const ParamFlags& p) {
  if (!p.config.empty()) {
    try {
      return {params_from_json(read_json(p.config))};
    } catch (const nlohmann::json::exception& e) {
      throw InvalidSpec("config '" + p.config + "': " + e.what());
    }
  }
  std::vector<ControlParams> out;
  for (double gamma : parse_list(p.gamma, "gamma")) {
    if (!(gamma >= 0.0)) throw InvalidSpec("--gamma must be ≥ 0");
    for (double eta : parse_list(p.eta, "eta")) {
      if (!(eta > 0.0)) throw InvalidSpec("--eta must be > 0");
      if (p.phi) {
        out.push_back(ControlParams::from_phi(eta, gamma, *p.phi));
      } else {
        out.push_back(ControlParams::from_t0(eta, gamma, p.t0.value_or(1.0), p.r0_sign));
      }
    }
  }
  return out;
}

nlohmann::json params_json(const ControlParams& p) {
  return {{"eta", p.eta}, {"gamma", p.gamma}, {"t0", p.t0}, {"r0", p.r0}, {"phi", p.phi}};
}

std::uint64_t resolve_seed(const EnsembleFlags& e) {
  if (e.seed) return *e.seed;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

rmt::EnsembleConfig ensemble_for(const EnsembleFlags& e, double gamma, std::uint64_t seed) {
  rmt::EnsembleConfig cfg;
  cfg.gamma = gamma;
  cfg.n_levels = e.matrix_size > 0 ? e.matrix_size : rmt::recommended_matrix_size(gamma);
  cfg.sampler = rmt::sampler_from_string(e.sampler);
  cfg.seed = seed;
  cfg.n_samples = e.n_samples;
  cfg.validate();
  return cfg;
}

// Sub-run i of a fan-out owns derive_seed(seed, i); a single run keeps seed.
std::uint64_t sub_seed(std::uint64_t seed, std::size_t i, std::size_t n) {
  return n == 1 ? seed : rmt::derive_seed(seed, i);
}

std::string output_root(const std::string& flag) {
  if (!flag.empty()) return flag;
  if (const char* env = std::getenv(kOutEnv); env != nullptr && *env != '\0') return env;
  return "resbg_runs";
}

std::string run_dir(const std::string& root, const nlohmann::json& config) {
  return (fs::path(root) / config_hash(config)).string();
}

nlohmann::json load_criteria(const std::string& path) {
  return read_json(path.empty() ? std::string(RESBG_CRITERIA_FILE) : path);
}

struct P0Choice {
  P0Kind kind = P0Kind::empirical;
  std::string file;
};

P0Choice parse_p0(const std::string& text) {
  P0Choice c;
  const auto colon = text.find(':');
  c.kind = p0_kind_from_string(text.substr(0, colon));
  if (colon != std::string::npos) {
    if (c.kind != P0Kind::empirical) throw InvalidSpec("only --p0 empirical takes a file");
    c.file = text.substr(colon + 1);
  }
  return c;
}

std::optional<P0Model> load_p0(const P0Choice& c, double gamma) {
  if (c.file.empty()) return std::nullopt;
  P0Model m = P0Model::from_json(read_json(c.file));
  if (std::abs(m.gamma() - gamma) > 1e-12 * std::max(1.0, gamma)) {
    std::ostringstream os;
    os << "P0 file '" << c.file << "' was calibrated at γ = " << m.gamma()
       << " but the run uses γ = " << gamma;
    throw InvalidSpec(os.str());
  }
  return m;
}

// ---------------------------------------------------------------- sample

struct SampleCmd {
  ParamFlags params;
  EnsembleFlags ensemble;
  std::string out;
};

int do_sample(const SampleCmd& cmd, std::ostream& out) {
  const auto cells = expand_params(cmd.params);
  const std::uint64_t seed = resolve_seed(cmd.ensemble);
  const std::string root = output_root(cmd.out);
  std::vector<std::string> dirs(cells.size());
  parallel_for(cells.size(), cmd.ensemble.jobs, [&](std::size_t i) {
    const ControlParams& p = cells[i];
    const auto cfg = ensemble_for(cmd.ensemble, p.gamma, sub_seed(seed, i, cells.size()));
    nlohmann::json config = {{"command", "sample"}, {"params", params_json(p)},
                             {"ensemble", ensemble_manifest(cfg)}};
    const std::string dir = run_dir(root, config);
    const auto samples = rmt::sample_stream(cfg, cells.size() == 1 ? cmd.ensemble.jobs : 1);
    std::vector<ScatteringPoint> points(samples.size());
    for (std::size_t k = 0; k < samples.size(); ++k) points[k] = evaluate(samples[k], p);
    write_samples_csv((fs::path(dir) / "samples.csv").string(), samples);
    write_observables_csv((fs::path(dir) / "observables.csv").string(), samples, points);
    nlohmann::json manifest = ensemble_manifest(cfg);
    manifest["params"] = params_json(p);
    manifest["config"] = config;
    write_json((fs::path(dir) / "manifest.json").string(), manifest);
    dirs[i] = dir;
  });
  for (const auto& d : dirs) out << d << '\n';
  return kExitOk;
}

// ------------------------------------------------------------------ eval

struct EvalCmd {
  ParamFlags params;
  std::string formula;
  std::string p0 = "strong";
  std::string grid;
  std::string grid_y;
  std::size_t calib_samples = 1000000;
  int matrix_size = 0;
  std::optional<std::uint64_t> seed;
  int jobs = 0;
  std::string out;
};

int do_eval(const EvalCmd& cmd, std::ostream& out) {
  const FormulaInfo& info = formula_info(cmd.formula);
  const auto cells = expand_params(cmd.params);
  const std::string root = output_root(cmd.out);
  for (std::size_t i = 0; i < cells.size(); ++i) {
    const ControlParams& p = cells[i];
    std::optional<P0Model> p0;
    nlohmann::json p0_json = nullptr;
    if (info.needs_p0) {
      if (p.gamma == 0.0) {
        throw InvalidSpec("formula '" + info.id +
                          "' needs γ > 0 (no P0 model exists at γ = 0); use p_t0, p_theta0 or "
                          "p_rho0 for zero absorption");
      }
      const P0Choice choice = parse_p0(cmd.p0);
      p0 = load_p0(choice, p.gamma);
      if (!p0) {
        switch (choice.kind) {
          case P0Kind::weak_asymptotic:
            p0 = P0Model::weak(p.gamma);
            break;
          case P0Kind::strong_asymptotic:
            p0 = P0Model::strong(p.gamma);
            break;
          case P0Kind::empirical: {
            const int n = cmd.matrix_size > 0 ? cmd.matrix_size : rmt::recommended_matrix_size(p.gamma);
            EnsembleFlags e;
            e.seed = cmd.seed;
            p0 = calibrate_p0(p.gamma, n, calibration_seed(resolve_seed(e)), cmd.calib_samples,
                              cmd.jobs);
            break;
          }
        }
      }
      p0_json = p0->to_json();
    }
    const BoundFormula f(info.id, p, p0);
    std::vector<GridAxis> axes;
    for (int k = 0; k < f.dims(); ++k) {
      const std::string& spec = k == 0 ? cmd.grid : cmd.grid_y;
      if (spec.empty()) {
        const auto [lo, hi] = f.support(k);
        axes.push_back(GridAxis{lo, hi, f.dims() == 1 ? 512 : 100});
      } else {
        axes.push_back(GridAxis::parse(spec));
      }
    }
    const PdfGrid grid = f.dims() == 1 ? tabulate(f, axes[0], cmd.jobs)
                                       : tabulate(f, axes[0], axes[1], cmd.jobs);
    nlohmann::json config = {{"command", "eval"},
                             {"formula", info.id},
                             {"params", params_json(p)},
                             {"p0", p0_json},
                             {"grid", grid.metadata.at("grid_spec")}};
    const std::string dir = run_dir(root, config);
    write_grid(dir, "grid", grid);
    nlohmann::json manifest = config;
    manifest["toolkit_version"] = kToolkitVersion;
    manifest["cell_sum"] = grid.cell_sum();
    if (f.dims() == 1) manifest["normalization"] = normalization(f);
    if (p0) write_json((fs::path(dir) / "p0.json").string(), p0->to_json());
    write_json((fs::path(dir) / "manifest.json").string(), manifest);
    out << dir;
    if (f.dims() == 1) out << "  normalization=" << manifest["normalization"].get<double>();
    out << "  cell_sum=" << grid.cell_sum() << '\n';
  }
  return kExitOk;
}

// --------------------------------------------------------------- compare

struct CompareCmd {
  ParamFlags params;
  EnsembleFlags ensemble;
  std::string formula;
  int figure = 0;
  std::string p0 = "empirical";
  std::size_t calib_samples = 1000000;
  std::string samples;
  std::string criteria;
  int bins = 0;
  std::string out;
};

struct FigurePreset {
  std::string formula;
  std::string eta;
  std::string gamma;
};

FigurePreset figure_preset(int figure) {
  switch (figure) {
    case 1:
      return {"joint_rt", "0.2,0.5,1,2", "0.1,1"};
    case 2:
      return {"p_t", "0.2,0.5,1,2", "1"};
    case 3:
      return {"joint_ttheta", "0.5,1,2", "0.1,1"};
    case 4:
      return {"p_theta", "0.5,1,2", "0.1,1,5"};
    default:
      throw InvalidSpec("--figure must be 1, 2, 3 or 4");
  }
}

void check_manifest(const std::string& samples_path, const ControlParams& p) {
  const fs::path manifest_path = fs::path(samples_path).parent_path() / "manifest.json";
  if (!fs::exists(manifest_path)) {
    throw ManifestMismatch("no manifest.json next to '" + samples_path + "'");
  }
  const nlohmann::json m = read_json(manifest_path.string());
  std::ostringstream diff;
  auto check = [&](const char* key, double expected, double actual) {
    if (std::abs(expected - actual) > 1e-12 * std::max(1.0, std::abs(expected))) {
      diff << "\n  " << key << ": samples have " << actual << ", run requests " << expected;
    }
  };
  check("gamma", p.gamma, m.at("gamma").get<double>());
  if (m.contains("params")) {
    const auto& mp = m.at("params");
    check("eta", p.eta, mp.at("eta").get<double>());
    check("t0", p.t0, mp.at("t0").get<double>());
    check("r0", p.r0, mp.at("r0").get<double>());
  }
  const std::string d = diff.str();
  if (!d.empty()) throw ManifestMismatch("sample manifest does not match the run:" + d);
}

int do_compare(const CompareCmd& cmd, std::ostream& out) {
  ParamFlags pf = cmd.params;
  std::string formula = cmd.formula;
  if (cmd.figure != 0) {
    if (!formula.empty()) throw InvalidSpec("--figure and --formula are mutually exclusive");
    const FigurePreset preset = figure_preset(cmd.figure);
    formula = preset.formula;
    pf.eta = preset.eta;
    pf.gamma = preset.gamma;
  }
  if (formula.empty()) throw InvalidSpec("compare needs --formula or --figure");
  if (formula != kMeanAmplitudes && formula != kGaussianLimit) formula_info(formula);
  const auto cells = expand_params(pf);
  const nlohmann::json criteria = load_criteria(cmd.criteria);
  const std::map<std::string, double> thresholds = thresholds_for(criteria, formula);
  const std::uint64_t seed = resolve_seed(cmd.ensemble);
  const std::string root = output_root(cmd.out);
  const P0Choice choice = parse_p0(cmd.p0);

  std::vector<rmt::GreensSample> external;
  if (!cmd.samples.empty()) {
    for (const auto& p : cells) check_manifest(cmd.samples, p);
    external = read_samples_csv(cmd.samples);
  }

  // Empirical P0 depends on γ only: one calibration per γ, shared by all η.
  std::map<double, P0Model> p0_cache;
  std::mutex cache_mutex;
  auto p0_for = [&](double gamma, int n_levels) -> std::optional<P0Model> {
    if (formula == kMeanAmplitudes || formula == kGaussianLimit) return std::nullopt;
    if (!formula_info(formula).needs_p0 || gamma == 0.0) return std::nullopt;
    if (auto m = load_p0(choice, gamma)) return m;
    if (choice.kind != P0Kind::empirical) return std::nullopt;
    std::lock_guard<std::mutex> lock(cache_mutex);
    auto it = p0_cache.find(gamma);
    if (it == p0_cache.end()) {
      it = p0_cache
               .emplace(gamma, calibrate_p0(gamma, n_levels, calibration_seed(seed),
                                            cmd.calib_samples, 1))
               .first;
    }
    return it->second;
  };

  std::vector<nlohmann::json> summaries(cells.size());
  std::vector<Comparison> results(cells.size());
  parallel_for(cells.size(), cmd.ensemble.jobs, [&](std::size_t i) {
    const ControlParams& p = cells[i];
    CompareOptions o;
    o.params = p;
    o.formula_id = formula;
    o.p0_kind = choice.kind;
    o.ensemble = ensemble_for(cmd.ensemble, p.gamma, sub_seed(seed, i, cells.size()));
    o.p0_model = p0_for(p.gamma, o.ensemble.n_levels);
    o.calib_samples = cmd.calib_samples;
    if (cmd.bins > 0) o.bins_1d = o.bins_2d = cmd.bins;
    o.jobs = cells.size() == 1 ? cmd.ensemble.jobs : 1;
    o.thresholds = thresholds;
    Comparison c = compare(o, external);
    nlohmann::json config = {{"command", "compare"},
                             {"formula", formula},
                             {"params", params_json(p)},
                             {"ensemble", c.report.metadata.at("ensemble")},
                             {"p0", cmd.p0},
                             {"calib_samples", cmd.calib_samples},
                             {"bins", cmd.bins},
                             {"samples", cmd.samples}};
    const std::string dir = run_dir(root, config);
    write_comparison(dir, c);
    nlohmann::json manifest = config;
    manifest["toolkit_version"] = kToolkitVersion;
    manifest["criteria_version"] = criteria.value("version", 0);
    write_json((fs::path(dir) / "manifest.json").string(), manifest);
    nlohmann::json s = {{"dir", dir}, {"eta", p.eta}, {"gamma", p.gamma},
                        {"passed", c.report.passed()}};
    if (c.report.ks_statistic) s["ks"] = *c.report.ks_statistic;
    if (c.report.l1_distance) s["l1"] = *c.report.l1_distance;
    summaries[i] = s;
    results[i] = std::move(c);
  });

  for (const auto& s : summaries) {
    out << s.at("dir").get<std::string>() << "  eta=" << s.at("eta") << " gamma=" << s.at("gamma");
    if (s.contains("ks")) out << " ks=" << s.at("ks");
    if (s.contains("l1")) out << " l1=" << s.at("l1");
    out << (s.at("passed").get<bool>() ? "  PASS" : "  FAIL") << '\n';
  }

  const bool has_curves = results.front().grid.has_value();
  if (has_curves && (cmd.figure != 0 || cells.size() > 1)) {
    nlohmann::json fig = {{"command", "compare"}, {"formula", formula},
                          {"figure", cmd.figure == 0 ? nlohmann::json() : nlohmann::json(cmd.figure)},
                          {"seed", seed},
                          {"n_samples", cmd.ensemble.n_samples}, {"runs", summaries}};
    const std::string dir = run_dir(root, {{"figure", fig.at("figure")}, {"formula", formula},
                                           {"eta", pf.eta}, {"gamma", pf.gamma}, {"seed", seed},
                                           {"n_samples", cmd.ensemble.n_samples},
                                           {"calib_samples", cmd.calib_samples}});
    fs::create_directories(dir);
    std::ofstream csv(fs::path(dir) / "curves.csv");
    csv.precision(17);
    const bool two_d = results.front().histogram2d.has_value();
    csv << (two_d ? "eta,gamma,x,y,analytic,mc\n" : "eta,gamma,x,analytic,mc,mc_error\n");
    for (std::size_t i = 0; i < results.size(); ++i) {
      const auto& c = results[i];
      const PdfGrid& g = *c.grid;
      if (two_d) {
        const auto& h = *c.histogram2d;
        for (int a = 0; a < h.nx; ++a) {
          for (int b = 0; b < h.ny; ++b) {
            csv << cells[i].eta << ',' << cells[i].gamma << ',' << g.x[static_cast<std::size_t>(a)]
                << ',' << g.y[static_cast<std::size_t>(b)] << ','
                << g.at(static_cast<std::size_t>(a), static_cast<std::size_t>(b)) << ','
                << h.density(a, b) << '\n';
          }
        }
      } else {
        const auto d = c.histogram->densities();
        const auto e = c.histogram->density_errors();
        for (std::size_t k = 0; k < g.x.size(); ++k) {
          csv << cells[i].eta << ',' << cells[i].gamma << ',' << g.x[k] << ',' << g.density[k]
              << ',' << d[k] << ',' << e[k] << '\n';
        }
      }
    }
    write_json((fs::path(dir) / "figure.json").string(), fig);
    out << dir << "  curves" << '\n';
  }
  return kExitOk;
}

// ------------------------------------------------------------------ scan

struct ScanCmd {
  ParamFlags params;
  EnsembleFlags ensemble;
  std::string criteria;
  bool force = false;
  std::string out;
};

int do_scan(const ScanCmd& cmd, std::ostream& out) {
  const auto cells = expand_params(cmd.params);
  const double total = static_cast<double>(cells.size()) * static_cast<double>(cmd.ensemble.n_samples);
  if ((cells.size() > kScanCellLimit || total > kScanSampleLimit) && !cmd.force) {
    std::ostringstream os;
    os << "scan of " << cells.size() << " cells × " << cmd.ensemble.n_samples
       << " samples exceeds the limit (" << kScanCellLimit << " cells, " << kScanSampleLimit
       << " samples); pass --force to run it anyway";
    throw InvalidSpec(os.str());
  }
  const nlohmann::json criteria = load_criteria(cmd.criteria);
  const std::uint64_t seed = resolve_seed(cmd.ensemble);
  const std::string root = output_root(cmd.out);

  std::vector<nlohmann::json> rows(cells.size());
  parallel_for(cells.size(), cmd.ensemble.jobs, [&](std::size_t i) {
    const ControlParams& p = cells[i];
    const auto ens = ensemble_for(cmd.ensemble, p.gamma, sub_seed(seed, i, cells.size()));
    const int jobs = cells.size() == 1 ? cmd.ensemble.jobs : 1;
    const auto samples = rmt::sample_stream(ens, jobs);
    CompareOptions o;
    o.params = p;
    o.ensemble = ens;
    o.jobs = jobs;
    nlohmann::json row = {{"eta", p.eta}, {"gamma", p.gamma}, {"seed", ens.seed}};
    o.formula_id = kMeanAmplitudes;
    o.thresholds = thresholds_for(criteria, kMeanAmplitudes);
    const Comparison means = compare(o, samples);
    row["mean_amplitudes"] = means.report.to_json(false);
    if (p.gamma > 0.0) {
      o.formula_id = kGaussianLimit;
      o.thresholds = thresholds_for(criteria, kGaussianLimit);
      const Comparison limit = compare(o, samples);
      row["gaussian_limit"] = limit.report.to_json(false);
    }
    rows[i] = row;
  });

  nlohmann::json config = {{"command", "scan"}, {"eta", cmd.params.eta}, {"gamma", cmd.params.gamma},
                           {"t0", cmd.params.t0 ? nlohmann::json(*cmd.params.t0) : nlohmann::json()},
                           {"phi", cmd.params.phi ? nlohmann::json(*cmd.params.phi) : nlohmann::json()},
                           {"seed", seed}, {"n_samples", cmd.ensemble.n_samples},
                           {"matrix_size", cmd.ensemble.matrix_size}, {"sampler", cmd.ensemble.sampler}};
  const std::string dir = run_dir(root, config);
  nlohmann::json report = {{"config", config}, {"toolkit_version", kToolkitVersion}, {"cells", rows}};
  write_json((fs::path(dir) / "scan.json").string(), report);
  std::ofstream csv(fs::path(dir) / "scan.csv");
  csv.precision(10);
  csv << "eta,gamma,mean_t,mean_t_se,expected_mean_t,var_sqrt_T,sigma2_T,ratio_T,var_theta,"
         "sigma2_theta,ratio_theta\n";
  for (const auto& r : rows) {
    const auto& m = r.at("mean_amplitudes");
    csv << r.at("eta") << ',' << r.at("gamma") << ',' << m["sample_moments"]["t_re"]["mean"] << ','
        << m["sample_moments"]["t_re"]["mean_se"] << ',' << m["analytic"]["t_re"];
    if (r.contains("gaussian_limit")) {
      const auto& g = r.at("gaussian_limit");
      csv << ',' << g["sample_moments"]["sqrt_T"]["variance"] << ',' << g["analytic"]["sigma2_T"]
          << ',' << g["analytic"]["var_ratio_sqrt_T"] << ',' << g["sample_moments"]["theta_T"]["variance"]
          << ',' << g["analytic"]["sigma2_theta"] << ',' << g["analytic"]["var_ratio_theta"];
    } else {
      csv << ",,,,,,";
    }
    csv << '\n';
  }
  out << dir << '\n';
  for (const auto& r : rows) {
    out << "  eta=" << r.at("eta") << " gamma=" << r.at("gamma");
    if (r.contains("gaussian_limit")) {
      out << " var_ratio_sqrt_T=" << r["gaussian_limit"]["analytic"]["var_ratio_sqrt_T"]
          << " var_ratio_theta=" << r["gaussian_limit"]["analytic"]["var_ratio_theta"];
    }
    out << '\n';
  }
  return kExitOk;
}

}  // namespace

std::map<std::string, double> thresholds_for(const nlohmann::json& criteria,
                                             const std::string& id) {
  std::map<std::string, double> t;
  if (criteria.contains("defaults")) {
    for (const auto& [k, v] : criteria.at("defaults").items()) t[k] = v.get<double>();
  }
  if (id != kMeanAmplitudes && id != kGaussianLimit && criteria.contains("norm_tol")) {
    const FormulaInfo& info = formula_info(id);
    const auto& n = criteria.at("norm_tol");
    const char* kind = info.needs_p0 ? "exact_p0" : "closed_form";
    if (n.contains(kind)) t["norm_tol"] = n.at(kind).get<double>();
  }
  if (criteria.contains("formulas") && criteria.at("formulas").contains(id)) {
    for (const auto& [k, v] : criteria.at("formulas").at(id).items()) t[k] = v.get<double>();
  }
  return t;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"resbg: statistics of resonance scattering on a chaotic absorbing background"};
  app.name("resbg");
  app.require_subcommand(1);

  SampleCmd sample;
  auto* s = app.add_subcommand("sample", "draw Green's-function samples and observables");
  add_param_flags(s, sample.params);
  add_ensemble_flags(s, sample.ensemble);
  s->add_option("--out", sample.out, "output root (default $RESBG_OUT or ./resbg_runs)");

  EvalCmd eval;
  auto* e = app.add_subcommand("eval", "tabulate an analytic density");
  add_param_flags(e, eval.params);
  e->add_option("--formula", eval.formula, "formula id")->required();
  e->add_option("--p0", eval.p0, "weak | strong | empirical[:<file>]");
  e->add_option("--grid", eval.grid, "lo:hi:n (first axis)");
  e->add_option("--grid-y", eval.grid_y, "lo:hi:n (second axis of 2D formulas)");
  e->add_option("--calib-samples", eval.calib_samples, "samples for an empirical P0");
  e->add_option("--matrix-size", eval.matrix_size, "N for an empirical P0");
  e->add_option("--seed", eval.seed, "seed for an empirical P0");
  e->add_option("--jobs", eval.jobs, "worker threads");
  e->add_option("--out", eval.out, "output root");

  CompareCmd compare_cmd;
  auto* c = app.add_subcommand("compare", "Monte-Carlo vs analytic comparison");
  add_param_flags(c, compare_cmd.params);
  add_ensemble_flags(c, compare_cmd.ensemble);
  c->add_option("--formula", compare_cmd.formula, "formula id, mean_amplitudes or gaussian_limit");
  c->add_option("--figure", compare_cmd.figure, "reproduce figure 1-4 as data");
  c->add_option("--p0", compare_cmd.p0, "weak | strong | empirical[:<file>]");
  c->add_option("--calib-samples", compare_cmd.calib_samples, "samples for an empirical P0");
  c->add_option("--samples", compare_cmd.samples, "samples.csv from a previous `sample` run");
  c->add_option("--criteria", compare_cmd.criteria, "criteria JSON (default: bundled v1)");
  c->add_option("--bins", compare_cmd.bins, "histogram bins per axis");
  c->add_option("--out", compare_cmd.out, "output root");

  ScanCmd scan;
  auto* sc = app.add_subcommand("scan", "means and Gaussian-limit variances over an (η, γ) grid");
  add_param_flags(sc, scan.params);
  add_ensemble_flags(sc, scan.ensemble);
  sc->add_option("--criteria", scan.criteria, "criteria JSON (default: bundled v1)");
  sc->add_flag("--force", scan.force, "allow grids above the size limit");
  sc->add_option("--out", scan.out, "output root");

  std::vector<std::string> reversed(args.begin() + (args.empty() ? 0 : 1), args.end());
  std::reverse(reversed.begin(), reversed.end());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& ex) {
    const int code = app.exit(ex, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (*s) return do_sample(sample, out);
    if (*e) return do_eval(eval, out);
    if (*c) return do_compare(compare_cmd, out);
    if (*sc) return do_scan(scan, out);
  } catch (const QuadratureError& ex) {
    err << "error: numerical nonconvergence: " << ex.what() << " (partial value "
        << ex.partial_value() << ", error estimate " << ex.error_estimate() << ")\n";
    return kExitNumerical;
  } catch (const InvalidSpec& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitValidation;
  } catch (const DomainError& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitValidation;
  } catch (const ManifestMismatch& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitValidation;
  } catch (const UnsupportedConfiguration& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& ex) {
    err << "error: " << ex.what() << '\n';
    return kExitFailure;
  }
  return kExitFailure;
}

}  // namespace resbg::cli
