#pragma once

#include "resbg/harness.hpp"
#include "resbg/observables.hpp"
#include "resbg/p0.hpp"
#include "resbg/rmt.hpp"

#include <vector>

namespace resbg::test {

// Shared γ = 1, N = 400 stream: 10⁵ tridiagonal draws, seed 20261018.
inline const std::vector<rmt::GreensSample>& gamma1_samples() {
  static const std::vector<rmt::GreensSample> samples = [] {
    rmt::EnsembleConfig cfg;
    cfg.n_levels = 400;
    cfg.gamma = 1.0;
    cfg.seed = 20261018;
    cfg.n_samples = 100000;
    return rmt::sample_stream(cfg);
  }();
  return samples;
}

// Empirical P0 at γ = 1 from an independent 2·10⁵-draw stream.
inline const P0Model& gamma1_p0() {
  static const P0Model model = calibrate_p0(1.0, 400, calibration_seed(20261018), 200000);
  return model;
}

template <typename F>
std::vector<double> observe(const std::vector<rmt::GreensSample>& samples,
                            const ControlParams& params, F&& pick) {
  std::vector<double> out;
  out.reserve(samples.size());
  for (const auto& s : samples) out.push_back(pick(evaluate(s, params)));
  return out;
}

}  // namespace resbg::test
