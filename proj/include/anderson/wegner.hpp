#pragma once

#include <cstdint>
#include <optional>

#include "anderson/disorder.hpp"
#include "anderson/mc_stats.hpp"
#include "anderson/scale_params.hpp"

namespace anderson {

// Empirical Wegner statistics: how often a finite ball is resonant at a fixed
// energy, and how often two far-apart balls carry eigenvalues closer than a
// threshold (the spacing event dominating the two-ball resonance probability).

struct WegnerConfig {
  int dim = 1;
  int L = 8;
  double g = 1.0;
  GeneratorSpec generator = GeneratorSpec::iid_uniform();
  long samples = 10000;
  std::uint64_t seed = 1;
  int workers = 0;
  ScaleParams params;
};

// Frequency of {B_L is E-resonant}: spectral gap at E below the threshold
// (default e^{-L^beta}; an explicit threshold keeps analytic oracles exact).
MonteCarloEstimate estimate_single_resonance(const WegnerConfig& cfg, double E,
                                             std::optional<double> threshold = std::nullopt);

// Frequency of {min_{i,j} |E_i(x) - E_j(y)| <= threshold} for two balls at
// the given center separation (default threshold 2 e^{-L^beta}). Overlapping
// balls are rejected.
MonteCarloEstimate estimate_pair_resonance(const WegnerConfig& cfg, int separation,
                                           std::optional<double> threshold = std::nullopt);

}  // namespace anderson
