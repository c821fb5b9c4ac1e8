#include "anderson/wegner.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "anderson/hamiltonian.hpp"
#include "anderson/parallel.hpp"
#include "anderson/predicates.hpp"
#include "anderson/rng.hpp"
#include "anderson/spectral.hpp"

namespace anderson {

namespace {

double min_spectral_spacing(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  // Both inputs ascending; sorted merge.
  double best = std::numeric_limits<double>::infinity();
  Eigen::Index i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    best = std::min(best, std::abs(a[i] - b[j]));
    if (a[i] < b[j])
      ++i;
    else
      ++j;
  }
  return best;
}

}  // namespace

MonteCarloEstimate estimate_single_resonance(const WegnerConfig& cfg, double E,
                                             std::optional<double> threshold) {
  const double t = threshold.value_or(resonance_width(cfg.L, cfg.params.beta));
  LatticeBall ball = LatticeBall::make(Site::Zero(cfg.dim), cfg.L);
  std::vector<char> hit(cfg.samples, 0);
  parallel_for(cfg.samples, cfg.workers, [&](long i) {
    PotentialField V = sample_field(ball, cfg.generator, static_cast<std::uint64_t>(i), cfg.seed);
    SpectralData sd = eig(assemble(ball, V, cfg.g));
    hit[i] = sd.min_gap(E) < t ? 1 : 0;
  });
  long hits = std::count(hit.begin(), hit.end(), 1);
  std::ostringstream ev;
  ev << "single_resonance(L=" << cfg.L << ",E=" << E << ",t=" << t << ",g=" << cfg.g << ")";
  return make_estimate(cfg.samples, hits, cfg.seed, ev.str());
}

MonteCarloEstimate estimate_pair_resonance(const WegnerConfig& cfg, int separation,
                                           std::optional<double> threshold) {
  if (separation <= 2 * cfg.L)
    throw std::invalid_argument("estimate_pair_resonance: balls overlap or touch");
  const double t = threshold.value_or(2.0 * resonance_width(cfg.L, cfg.params.beta));

  Site cx = Site::Zero(cfg.dim);
  Site cy = Site::Zero(cfg.dim);
  cy[0] = separation;
  LatticeBall bx = LatticeBall::make(cx, cfg.L);
  LatticeBall by = LatticeBall::make(cy, cfg.L);
  // One field covering both balls keeps the two spectra driven by one sample.
  LatticeBall world = LatticeBall::make(cx, separation + cfg.L);

  std::vector<char> hit(cfg.samples, 0);
  parallel_for(cfg.samples, cfg.workers, [&](long i) {
    PotentialField V =
        sample_field(world, cfg.generator, static_cast<std::uint64_t>(i), cfg.seed);
    SpectralData sx = eig(assemble(bx, V, cfg.g));
    SpectralData sy = eig(assemble(by, V, cfg.g));
    hit[i] = min_spectral_spacing(sx.eigenvalues, sy.eigenvalues) <= t ? 1 : 0;
  });
  long hits = std::count(hit.begin(), hit.end(), 1);
  std::ostringstream ev;
  ev << "pair_spacing(L=" << cfg.L << ",sep=" << separation << ",t=" << t << ",g=" << cfg.g
     << ")";
  return make_estimate(cfg.samples, hits, cfg.seed, ev.str());
}

}  // namespace anderson
