#include "anderson/gri_harness.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "anderson/hamiltonian.hpp"
#include "anderson/parallel.hpp"
#include "anderson/predicates.hpp"
#include "anderson/rng.hpp"
#include "anderson/spectral.hpp"

namespace anderson {

namespace {

struct SampleTally {
  long res_checked = 0, res_violations = 0;
  long ef_checked = 0, ef_violations = 0;
  long skipped = 0;
  double worst_res = 0.0, worst_ef = 0.0;
};

}  // namespace

GriFuzzReport run_gri_fuzz(const GriFuzzConfig& cfg) {
  LatticeBall outer_ball = LatticeBall::make(Site::Zero(cfg.dim), cfg.L);
  const double rel = 1e-9;

  std::vector<SampleTally> slots(cfg.samples);
  parallel_for(cfg.samples, cfg.workers, [&](long s) {
    SampleTally& t = slots[s];
    PotentialField field =
        sample_field(outer_ball, cfg.generator, static_cast<std::uint64_t>(s), cfg.seed);
    SpectralData outer = eig(assemble(outer_ball, field, cfg.g));
    SubBallCache cache(field, cfg.g, cfg.params);
    const int n = outer.size();

    // Energies between consecutive outer eigenvalues, spread evenly.
    std::vector<double> energies;
    int picks = std::min(cfg.energies_per_sample, n - 1);
    for (int e = 0; e < picks; ++e) {
      int j = (e + 1) * (n - 1) / (picks + 1);
      energies.push_back(0.5 * (outer.eigenvalues[j] + outer.eigenvalues[j + 1]));
    }

    for (int xi = 0; xi < n; ++xi) {
      Site x = outer_ball.site(xi);
      CachedBall& q = cache.get(x, cfg.ell);
      const SpectralData& inner = q.sd;
      BoundarySet bset = boundary(inner.ball);
      const double C = static_cast<double>(bset.bonds.size());
      const int ix_inner = inner.ball.index_of(x);

      std::vector<int> inner_idx, outer_idx;
      for (const Site& v : bset.inner) inner_idx.push_back(inner.ball.index_of(v));
      for (const Site& v : bset.outer) outer_idx.push_back(outer.ball.index_of(v));

      // Eigenfunction form, every eigenpair of the outer operator.
      for (int j = 0; j < n; ++j) {
        double Ej = outer.eigenvalues[j];
        if (inner.min_gap(Ej) < 1e-8 * (1.0 + std::abs(Ej))) {
          ++t.skipped;
          continue;
        }
        double first = 0.0, second = 0.0;
        for (int k : inner_idx) first = std::max(first, std::abs(green(inner, Ej, ix_inner, k)));
        for (int k : outer_idx)
          second = std::max(second, std::abs(outer.eigenvectors(k, j)));
        double lhs = std::abs(outer.eigenvectors(xi, j));
        double rhs = C * first * second;
        ++t.ef_checked;
        if (rhs > 0) t.worst_ef = std::max(t.worst_ef, lhs / rhs);
        if (lhs > rhs * (1.0 + rel) + 1e-300) ++t.ef_violations;
      }

      // Resolvent form at the spectra-avoiding energies, every exterior site.
      for (double E : energies) {
        if (outer.min_gap(E) < 1e-8 * (1.0 + std::abs(E)) ||
            inner.min_gap(E) < 1e-8 * (1.0 + std::abs(E))) {
          ++t.skipped;
          continue;
        }
        double first = 0.0;
        for (int k : inner_idx) first = std::max(first, std::abs(green(inner, E, ix_inner, k)));
        Eigen::MatrixXd W = outer.eigenvectors *
                            (1.0 / (outer.eigenvalues.array() - E)).matrix().asDiagonal();
        for (int yi = 0; yi < n; ++yi) {
          if (inner.ball.contains(outer_ball.site(yi))) continue;
          double lhs = std::abs(W.row(xi).dot(outer.eigenvectors.row(yi)));
          double second = 0.0;
          for (int k : outer_idx)
            second = std::max(second, std::abs(W.row(k).dot(outer.eigenvectors.row(yi))));
          double rhs = C * first * second;
          ++t.res_checked;
          if (rhs > 0) t.worst_res = std::max(t.worst_res, lhs / rhs);
          if (lhs > rhs * (1.0 + rel) + 1e-300) ++t.res_violations;
        }
      }
    }
  });

  GriFuzzReport rep;
  for (const SampleTally& t : slots) {
    rep.resolvent_checked += t.res_checked;
    rep.resolvent_violations += t.res_violations;
    rep.ef_checked += t.ef_checked;
    rep.ef_violations += t.ef_violations;
    rep.skipped += t.skipped;
    rep.worst_resolvent_ratio = std::max(rep.worst_resolvent_ratio, t.worst_res);
    rep.worst_ef_ratio = std::max(rep.worst_ef_ratio, t.worst_ef);
  }
  return rep;
}

}  // namespace anderson
