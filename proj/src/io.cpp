#include "resbg/io.hpp"

#include "resbg/error.hpp"

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

namespace resbg {

namespace {

std::ofstream open_out(const std::string& path) {
  const auto parent = std::filesystem::path(path).parent_path();
  if (!parent.empty()) std::filesystem::create_directories(parent);
  std::ofstream out(path);
  if (!out) throw Error("cannot open '" + path + "' for writing");
  return out;
}

// Shortest text that round-trips (17 significant digits at most).
std::string num(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

}  // namespace

std::string config_hash(const nlohmann::json& canonical) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : canonical.dump()) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

nlohmann::json ensemble_manifest(const rmt::EnsembleConfig& config) {
  return {{"seed", config.seed},
          {"N", config.n_levels},
          {"gamma", config.gamma},
          {"sampler", rmt::to_string(config.sampler)},
          {"n_samples", config.n_samples},
          {"toolkit_version", kToolkitVersion}};
}

void write_json(const std::string& path, const nlohmann::json& j) {
  auto out = open_out(path);
  out << j.dump(2) << '\n';
}

nlohmann::json read_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidSpec("cannot read '" + path + "'");
  try {
    return nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw InvalidSpec("'" + path + "' is not valid JSON: " + e.what());
  }
}

void write_samples_csv(const std::string& path, std::span<const rmt::GreensSample> samples) {
  auto out = open_out(path);
  out << "u,v,x\n";
  for (const auto& s : samples) {
    out << num(s.u) << ',' << num(s.v) << ',';
    if (s.has_x()) out << num(s.x());
    out << '\n';
  }
}

std::vector<rmt::GreensSample> read_samples_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidSpec("cannot read samples file '" + path + "'");
  std::string line;
  std::getline(in, line);
  if (line.rfind("u,v", 0) != 0) throw InvalidSpec("'" + path + "' lacks the u,v,x header");
  std::vector<rmt::GreensSample> out;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    std::istringstream fields(line);
    std::string u;
    std::string v;
    if (!std::getline(fields, u, ',') || !std::getline(fields, v, ',')) {
      throw InvalidSpec("'" + path + "' row " + std::to_string(row) + " is malformed");
    }
    try {
      out.push_back({std::stod(u), std::stod(v)});
    } catch (const std::exception&) {
      throw InvalidSpec("'" + path + "' row " + std::to_string(row) + " is not numeric");
    }
  }
  return out;
}

void write_observables_csv(const std::string& path, std::span<const rmt::GreensSample> samples,
                           std::span<const ScatteringPoint> points) {
  auto out = open_out(path);
  out << "u,v,t_re,t_im,rp_re,rp_im,rm_re,rm_im,T,R_plus,R_minus,theta_T,theta_Rp,theta_Rm,d,rho\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    const auto& p = points[i];
    out << num(samples[i].u) << ',' << num(samples[i].v) << ',' << num(p.t.real()) << ','
        << num(p.t.imag()) << ',' << num(p.r_plus.real()) << ',' << num(p.r_plus.imag()) << ','
        << num(p.r_minus.real()) << ',' << num(p.r_minus.imag()) << ',' << num(p.T) << ','
        << num(p.R_plus) << ',' << num(p.R_minus) << ',' << num(p.theta_T) << ','
        << num(p.theta_R_plus) << ',' << num(p.theta_R_minus) << ',' << num(p.d) << ','
        << num(p.rho) << '\n';
  }
}

void write_grid(const std::string& dir, const std::string& stem, const PdfGrid& grid) {
  auto out = open_out((std::filesystem::path(dir) / (stem + ".csv")).string());
  if (grid.dims() == 1) {
    out << "x,density\n";
    for (std::size_t i = 0; i < grid.x.size(); ++i) {
      out << num(grid.x[i]) << ',' << num(grid.density[i]) << '\n';
    }
  } else {
    out << "x,y,density\n";
    for (std::size_t i = 0; i < grid.x.size(); ++i) {
      for (std::size_t j = 0; j < grid.y.size(); ++j) {
        out << num(grid.x[i]) << ',' << num(grid.y[j]) << ',' << num(grid.at(i, j)) << '\n';
      }
    }
  }
  nlohmann::json meta = grid.metadata;
  meta["variables"] = grid.variables;
  write_json((std::filesystem::path(dir) / (stem + ".json")).string(), meta);
}

}  // namespace resbg
