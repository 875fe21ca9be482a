#pragma once

#include "resbg/formulas.hpp"
#include "resbg/observables.hpp"
#include "resbg/rmt.hpp"

#include <json.hpp>

#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace resbg {

inline constexpr const char* kToolkitVersion = "1.0.0";

/// 64-bit FNV-1a of the compact JSON dump, as 16 hex digits.
std::string config_hash(const nlohmann::json& canonical);

/// {seed, N, gamma, sampler, n_samples, toolkit_version}.
nlohmann::json ensemble_manifest(const rmt::EnsembleConfig& config);

void write_json(const std::string& path, const nlohmann::json& j);
nlohmann::json read_json(const std::string& path);

/// Header `u,v,x`; x is left empty when v = 0. 17 significant digits.
void write_samples_csv(const std::string& path, std::span<const rmt::GreensSample> samples);
/// Reads the u,v columns back; throws InvalidSpec on malformed rows.
std::vector<rmt::GreensSample> read_samples_csv(const std::string& path);

/// `u,v,t_re,t_im,rp_re,rp_im,rm_re,rm_im,T,R_plus,R_minus,theta_T,theta_Rp,theta_Rm,d,rho`.
void write_observables_csv(const std::string& path, std::span<const rmt::GreensSample> samples,
                           std::span<const ScatteringPoint> points);

/// `<stem>.csv` (`x,density` or `x,y,density`) plus `<stem>.json` metadata.
void write_grid(const std::string& dir, const std::string& stem, const PdfGrid& grid);

}  // namespace resbg
