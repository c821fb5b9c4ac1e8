#pragma once

#include <cmath>
#include <string>

namespace anderson {

/**
 * Exponent bundle of the multiscale analysis.
 *
 * alpha drives the scale recursion L_{k+1} = floor(L_k^alpha) + 1; beta sets
 * the resonance width e^{-L^beta}; the singularity and localization bounds
 * use the mass gamma(m, L) = m (1 + L^{-tau}) over pair distances
 * >= L^{(1+rho)/alpha}. With the defaults alpha = 4/3, rho = 1/6 the distance
 * floor is L^{7/8}. The probability exponents (p, b) must satisfy
 * p > 2 alpha^2 d / (2 - alpha^2) and 0 < 3b <= (2 - alpha^2)/alpha^2 - 2d/p
 * before a scale induction is run.
 */
struct ScaleParams {
  int L0 = 8;
  double alpha = 4.0 / 3.0;
  double beta = 0.5;
  double beta_prime = 0.25;
  double rho = 1.0 / 6.0;
  double tau = 0.125;
  double m = 1.0;   // inverse length
  double p = 17.0;
  double b = 0.002;
  int dim = 1;
};

// gamma(m, L) = m (1 + L^{-1/8}); always > m, decreasing in L.
inline double gamma_mass(double m, double L, double tau = 0.125) {
  return m * (1.0 + std::pow(L, -tau));
}

// Entries of computed eigenvectors below this threshold are numerical ghosts
// (backward-error mixing of near-degenerate levels, ~eps |H| / spacing) and
// carry no information about the true operator. Predicates built on
// eigenvector products treat them as zero; Green-function paths are not
// floored, since the eigen-expansion resolvent stays exponentially accurate.
inline constexpr double kPsiFloor = 1e-13;

// ceil(L^e) with snapping of exact integer powers against float drift.
inline int ceil_pow(int L, double e) {
  double v = std::pow(static_cast<double>(L), e);
  double r = std::round(v);
  if (std::abs(v - r) < 1e-9 * std::max(1.0, r)) v = r;
  return static_cast<int>(std::ceil(v));
}

// Minimal pair distance entering the singularity/localization predicates.
inline int distance_floor(int L, const ScaleParams& params) {
  return ceil_pow(L, (1.0 + params.rho) / params.alpha);
}

// Smallest sub-ball radius scanned by complete non-resonance.
inline int cnr_min_radius(int L, const ScaleParams& params) {
  return ceil_pow(L, 1.0 / params.alpha);
}

inline double resonance_width(int L, double beta) {
  return std::exp(-std::pow(static_cast<double>(L), beta));
}

}  // namespace anderson
