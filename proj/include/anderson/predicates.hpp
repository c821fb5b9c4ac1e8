#pragma once

#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "anderson/disorder.hpp"
#include "anderson/hamiltonian.hpp"
#include "anderson/lattice.hpp"
#include "anderson/scale_params.hpp"
#include "anderson/spectral.hpp"

namespace anderson {

struct CostGuardError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// --- sub-ball eigendecomposition cache ---------------------------------------
//
// The complete-nonresonance scan and the scale induction re-query the same
// sub-ball operators heavily; decompositions are cached per sample, keyed by
// (center, radius). Sub-balls are Dirichlet restrictions of the sample's
// potential, clipped to the field's extent. The cache is confined to one
// worker; no cross-thread sharing.

struct CachedBall {
  SpectralData sd;
  // Certificate table for the fast nonsingularity test:
  //   A_j = max over qualifying pairs of |psi_j(x) psi_j(y)| e^{gamma r}.
  // |bd B| sum_j A_j / |E_j - E| <= e^{2 L^beta} certifies (E, m)-NS exactly.
  Eigen::VectorXd ns_certificate;
  double ns_threshold = 0.0;     // e^{2 L^beta}
  double res_width = 0.0;        // e^{-L^beta}
  int pair_floor = 0;            // minimal qualifying pair distance
  std::optional<bool> localized; // lazily evaluated m-localization verdict
};

class SubBallCache {
 public:
  SubBallCache(const PotentialField& field, double g, const ScaleParams& params,
               BoundaryCondition bc = BoundaryCondition::dirichlet,
               KineticConvention conv = KineticConvention::adjacency);

  CachedBall& get(const Site& center, int radius);
  const PotentialField& field() const { return *field_; }
  const ScaleParams& params() const { return params_; }
  double coupling() const { return g_; }
  long eigensolves() const { return eigensolves_; }

 private:
  const PotentialField* field_;
  double g_;
  ScaleParams params_;
  BoundaryCondition bc_;
  KineticConvention conv_;
  long eigensolves_ = 0;
  std::map<std::pair<std::vector<int>, int>, std::unique_ptr<CachedBall>> cache_;
};

// --- elementary predicates ----------------------------------------------------

// E-resonant: resolvent norm exceeds e^{L^beta}, i.e. the spectral gap at E is
// below e^{-L^beta}. Equality stays nonresonant (ties classify as the good
// case throughout).
bool is_E_resonant(const SpectralData& sd, double E, const ScaleParams& params);

struct SubBallWitness {
  Site center;
  int radius = 0;
};

struct CnrResult {
  bool cnr = true;
  std::optional<SubBallWitness> witness;  // an E-resonant sub-ball, when found
  long scanned = 0;
};

// Complete E-nonresonance: no E-resonant sub-ball B_l(v) inside the ball with
// l >= L^{1/alpha} (the ball itself included). radius_set overrides the
// default radius range. Refuses more than 10^6 sub-ball eigensolves unless
// forced.
CnrResult is_E_CNR(SubBallCache& cache, const Site& center, int L, double E,
                   const ScaleParams& params,
                   const std::vector<int>* radius_set = nullptr, bool force = false);

struct NsResult {
  bool nonsingular = true;
  double worst_margin = -std::numeric_limits<double>::infinity();
  int worst_x = -1, worst_y = -1;  // site indices of the worst pair
  long pairs = 0;
};

// (E, m)-nonsingular: |bd B| |G(x,y;E)| <= e^{-gamma(m,L) r + 2 L^beta} for
// every pair at distance r >= L^{(1+rho)/alpha}. Throws ResonanceError when E
// is within 1e-12 of the spectrum.
NsResult is_Em_nonsingular(const SpectralData& sd, double E, const ScaleParams& params);

enum class Singularity { nonsingular, singular, resonant };

// Cached variant used inside energy scans: energies within 1e-12 of the
// spectrum classify as resonant (the ball cannot be nonsingular there).
Singularity singularity_at(CachedBall& ball, double E, const ScaleParams& params);

struct LocResult {
  bool localized = true;
  double worst_margin = -std::numeric_limits<double>::infinity();
  int worst_j = -1, worst_x = -1, worst_y = -1;
};

// m-localized: every eigenfunction satisfies
// |psi(x)||psi(y)| <= e^{-gamma(m,L) r} over pairs at distance r >= floor.
LocResult is_m_localized(const SpectralData& sd, const ScaleParams& params);

bool cached_localized(CachedBall& ball, const ScaleParams& params);

enum class TunnelingVariant { disjoint, within_3ell };

struct TunnelingResult {
  bool tunneling = false;
  std::optional<std::pair<Site, Site>> witness;
  long scanned = 0;
};

// m-tunneling: the ball contains a pair of m-nonlocalized radius-ell
// sub-balls — disjoint centers (d > 2 ell, the default) or the close-pair
// reading d <= 3 ell used with correlated potentials.
TunnelingResult is_m_tunneling(SubBallCache& cache, const Site& center, int L, int ell,
                               const ScaleParams& params,
                               TunnelingVariant variant = TunnelingVariant::disjoint,
                               bool force = false);

// --- energy scans -------------------------------------------------------------

struct EnergyGrid {
  std::vector<double> points;  // sorted
  bool truncated = false;      // point budget forced a coarser step
};

// Eigenvalues of the supplied balls, midpoints of consecutive ones, and a
// uniform grid of step e^{-ell^beta}/2 across I.
EnergyGrid build_energy_grid(const std::vector<const SpectralData*>& balls, Interval I,
                             double beta, int ell, long max_points = 200000);

struct MITunnelingResult {
  bool tunneling = false;
  std::optional<double> witness_E;
  std::optional<std::pair<Site, Site>> witness;
  bool grid_limited = false;
  Interval scanned{0.0, 0.0};
};

// (m, I)-tunneling: some E in I makes two disjoint radius-ell sub-balls
// (E, m)-singular; the existential over E runs on the default grid.
MITunnelingResult is_mI_tunneling(SubBallCache& cache, const Site& center, int L, int ell,
                                  Interval I, const ScaleParams& params,
                                  long max_grid_points = 200000, bool force = false);

// Existential over all of R: the grid covers the spectral hull, and the tails
// are certified nonsingular via the monotone certificate bound. grid_limited
// marks verdicts whose tails could not be certified within the point budget.
MITunnelingResult exists_disjoint_singular_pair_any_E(SubBallCache& cache, const Site& center,
                                                      int L, int ell,
                                                      const ScaleParams& params,
                                                      long max_grid_points = 200000,
                                                      bool force = false);

// --- deterministic implications ----------------------------------------------

enum class LemmaStatus { precondition_unmet, holds, violated };

struct LemmaCheck {
  std::string lemma;
  LemmaStatus status = LemmaStatus::precondition_unmet;
  bool gate_ok = false;
  bool strict_gate_ok = false;  // gate including the |bd B| factor
  bool hypothesis_ok = false;
  bool grid_limited = false;
  std::string detail;
};

// (a) localized + E-nonresonant => (E,m)-nonsingular, under the volume gate
//     ln (2L+1)^d <= L^beta.
LemmaCheck check_loc_nr_ns(const SpectralData& sd, double E, const ScaleParams& params);

// (b) E-CNR + no pair of disjoint (E,m)-singular radius-ell sub-balls
//     => (E,m)-nonsingular.
LemmaCheck check_cnr_nopair_ns(SubBallCache& cache, const Site& center, int L, int ell,
                               double E, const ScaleParams& params);

// (c) no pair of disjoint (E,m)-singular radius-ell sub-balls for any E
//     => m-localized.
LemmaCheck check_nopair_loc(SubBallCache& cache, const Site& center, int L, int ell,
                            const ScaleParams& params);

// (d) m-nontunneling + E-nonresonant => (E,m)-nonsingular (correlated form).
LemmaCheck check_ntun_nr_ns(SubBallCache& cache, const Site& center, int L, int ell,
                            double E, const ScaleParams& params, TunnelingVariant variant);

// (e) m-nontunneling => m-localized (correlated form).
LemmaCheck check_ntun_loc(SubBallCache& cache, const Site& center, int L, int ell,
                          const ScaleParams& params, TunnelingVariant variant);

const char* to_string(LemmaStatus s);

}  // namespace anderson
