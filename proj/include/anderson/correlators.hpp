#pragma once

#include <cstdint>
#include <vector>

#include "anderson/disorder.hpp"
#include "anderson/mc_stats.hpp"
#include "anderson/scale_params.hpp"
#include "anderson/spectral.hpp"

namespace anderson {

// Eigenfunction correlator Q(x, y; I) = sum_{E_j in I} |psi_j(x)| |psi_j(y)|.
// Always in [0, 1] (Bessel + Cauchy-Schwarz); when the eigenvalues in I are
// simple it equals the sup over |phi| <= 1 of |<delta_x| phi(H) P_I |delta_y>|.
struct CorrelatorRecord {
  Site x, y;
  Interval interval;
  double Q = 0.0;
  int distance = 0;
  bool degenerate = false;  // some eigenvalue in I repeated within 1e-12
};

CorrelatorRecord ef_correlator(const SpectralData& sd, const Site& x, const Site& y,
                               Interval I);

// Finite-volume dynamical-localization bound: over n samples on the ambient
// ball, the mean correlator between two far-apart probe sites is tested
// against  2 |S| e^{-mL} + f_hat + 3 SE,  where |S| is the exact bond count
// of the two probe balls and f_hat estimates the pair-singularity frequency.
struct DlConfig {
  int dim = 1;
  int L = 8;                 // probe ball radius
  int ambient_radius = 25;   // Lambda = B_R(0)
  double g = 100.0;
  GeneratorSpec generator = GeneratorSpec::iid_uniform();
  long samples = 500;
  std::uint64_t seed = 1;
  int workers = 0;
  ScaleParams params;
  long max_grid_points = 200000;
};

struct DlReport {
  double mean_Q = 0.0;
  double se_Q = 0.0;
  MonteCarloEstimate pair_singular;  // f_hat
  long exact_S = 0;                  // |bd B_L(x)| + |bd B_L(y)|
  double deterministic_term = 0.0;   // 2 |S| e^{-mL}
  double bound = 0.0;                // deterministic_term + f_hat + 3 SE
  bool ok = false;
  double fitted_C = 0.0;             // (mean_Q - f_hat) / (L^d e^{-mL}), floored at 0
  int separation = 0;
};

DlReport dl_bound_check(const DlConfig& cfg);

// Exponential-decay fit of one eigenfunction around its localization center
// (argmax of |psi|, lexicographic smallest on ties). The hard check tests
// |psi(y)| <= e^{-m ||y - center||} over distances >= L^{(1+rho)/alpha}.
struct DecayFit {
  int index = -1;
  Site center;
  double rate = 0.0;          // least-squares decay rate of ln |psi|
  double max_residual = 0.0;
  bool hard_pass = true;
  long checked = 0;
  long fit_points = 0;        // resolvable tail values; rate needs >= 2
};

std::vector<DecayFit> decay_fit(const SpectralData& sd, const ScaleParams& params);

}  // namespace anderson
