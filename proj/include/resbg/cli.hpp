#pragma once

#include <json.hpp>

#include <map>
#include <ostream>
#include <string>
#include <vector>

namespace resbg::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitNumerical = 3;

/// Environment variable naming the default output root.
inline constexpr const char* kOutEnv = "RESBG_OUT";

/// Thresholds for formula `id` from a criteria document: "defaults", then
/// "norm_tol" by formula kind, then per-formula overrides.
std::map<std::string, double> thresholds_for(const nlohmann::json& criteria,
                                             const std::string& id);

/// Runs `resbg <subcommand> ...`; argv[0] is the program name. Never
/// throws: errors are printed to `err` and mapped to exit codes.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace resbg::cli
