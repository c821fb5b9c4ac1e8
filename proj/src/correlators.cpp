#include "anderson/correlators.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "anderson/hamiltonian.hpp"
#include "anderson/parallel.hpp"
#include "anderson/predicates.hpp"
#include "anderson/rng.hpp"

namespace anderson {

CorrelatorRecord ef_correlator(const SpectralData& sd, const Site& x, const Site& y,
                               Interval I) {
  int ix = sd.ball.index_of(x);
  int iy = sd.ball.index_of(y);
  if (ix < 0 || iy < 0) throw std::invalid_argument("ef_correlator: site outside the ball");
  CorrelatorRecord rec;
  rec.x = x;
  rec.y = y;
  rec.interval = I;
  rec.distance = dist_max(x, y);
  double prev = std::numeric_limits<double>::quiet_NaN();
  for (int j = 0; j < sd.size(); ++j) {
    double e = sd.eigenvalues[j];
    if (!I.contains(e)) continue;
    rec.Q += std::abs(sd.eigenvectors(ix, j) * sd.eigenvectors(iy, j));
    if (!std::isnan(prev) && std::abs(e - prev) <= 1e-12) rec.degenerate = true;
    prev = e;
  }
  return rec;
}

DlReport dl_bound_check(const DlConfig& cfg) {
  DlReport rep;
  const int R = cfg.ambient_radius;
  const int L = cfg.L;
  if (2 * (R - L) <= 2 * L + 1)
    throw std::invalid_argument("dl_bound_check: ambient too small for the probe geometry");

  Site x = Site::Zero(cfg.dim);
  Site y = Site::Zero(cfg.dim);
  x[0] = -(R - L);
  y[0] = R - L;
  rep.separation = dist_max(x, y);

  LatticeBall ambient = LatticeBall::make(Site::Zero(cfg.dim), R);
  LatticeBall bx = LatticeBall::make(x, L, ambient.spec());
  LatticeBall by = LatticeBall::make(y, L, ambient.spec());
  rep.exact_S = boundary_bond_count(bx) + boundary_bond_count(by);

  std::vector<double> q(cfg.samples, 0.0);
  std::vector<char> singular_hit(cfg.samples, 0);
  parallel_for(cfg.samples, cfg.workers, [&](long i) {
    PotentialField field =
        sample_field(ambient, cfg.generator, static_cast<std::uint64_t>(i), cfg.seed);
    SpectralData sd = eig(assemble(ambient, field, cfg.g));
    Interval I{sd.eigenvalues[0] - 1.0, sd.eigenvalues[sd.size() - 1] + 1.0};
    q[i] = ef_correlator(sd, x, y, I).Q;

    SubBallCache cache(field, cfg.g, cfg.params);
    CachedBall& cu = cache.get(x, L);
    CachedBall& cv = cache.get(y, L);
    std::vector<const SpectralData*> sds{&cu.sd, &cv.sd};
    EnergyGrid grid = build_energy_grid(sds, I, cfg.params.beta, L, cfg.max_grid_points);
    for (double E : grid.points) {
      if (singularity_at(cu, E, cfg.params) == Singularity::nonsingular) continue;
      if (singularity_at(cv, E, cfg.params) == Singularity::nonsingular) continue;
      singular_hit[i] = 1;
      break;
    }
  });

  double n = static_cast<double>(cfg.samples);
  for (double v : q) rep.mean_Q += v;
  rep.mean_Q /= n;
  double var = 0.0;
  for (double v : q) var += (v - rep.mean_Q) * (v - rep.mean_Q);
  var = cfg.samples > 1 ? var / (n - 1.0) : 0.0;
  rep.se_Q = std::sqrt(var / n);

  long hits = std::count(singular_hit.begin(), singular_hit.end(), 1);
  std::ostringstream ev;
  ev << "pair_singular(L=" << L << ",sep=" << rep.separation << ",g=" << cfg.g << ")";
  rep.pair_singular = make_estimate(cfg.samples, hits, cfg.seed, ev.str());

  rep.deterministic_term =
      2.0 * static_cast<double>(rep.exact_S) * std::exp(-cfg.params.m * L);
  rep.bound = rep.deterministic_term + rep.pair_singular.p_hat + 3.0 * rep.se_Q;
  rep.ok = rep.mean_Q <= rep.bound;

  double vol = std::pow(static_cast<double>(L), cfg.dim) * std::exp(-cfg.params.m * L);
  rep.fitted_C = std::max(0.0, (rep.mean_Q - rep.pair_singular.p_hat) / vol);
  return rep;
}

std::vector<DecayFit> decay_fit(const SpectralData& sd, const ScaleParams& params) {
  const int n = sd.size();
  const int floor = distance_floor(sd.ball.radius(), params);
  std::vector<DecayFit> fits;
  fits.reserve(n);
  for (int j = 0; j < n; ++j) {
    DecayFit fit;
    fit.index = j;
    int imax = 0;
    double best = -1.0;
    for (int i = 0; i < n; ++i) {
      double a = std::abs(sd.eigenvectors(i, j));
      if (a > best) {  // enumeration is lexicographic, so first max wins ties
        best = a;
        imax = i;
      }
    }
    fit.center = sd.ball.site(imax);

    // Least squares of ln|psi(y)| against -||y - center|| over qualifying y.
    double sr = 0, sl = 0, srr = 0, srl = 0;
    long cnt = 0;
    for (int i = 0; i < n; ++i) {
      int r = dist_max(sd.ball.site(i), fit.center);
      if (r < floor) continue;
      ++fit.checked;
      double a = std::abs(sd.eigenvectors(i, j));
      if (a <= kPsiFloor) a = 0.0;  // below the eigenvector resolution
      if (a > std::exp(-params.m * r)) fit.hard_pass = false;
      if (a < 1e-300) continue;  // zero tail contributes no fit point
      double lr = static_cast<double>(r), ll = std::log(a);
      sr += lr;
      sl += ll;
      srr += lr * lr;
      srl += lr * ll;
      ++cnt;
    }
    fit.fit_points = cnt;
    if (cnt >= 2 && srr * cnt - sr * sr > 0) {
      double slope = (srl * cnt - sr * sl) / (srr * cnt - sr * sr);
      double intercept = (sl - slope * sr) / cnt;
      fit.rate = -slope;
      for (int i = 0; i < n; ++i) {
        int r = dist_max(sd.ball.site(i), fit.center);
        if (r < floor) continue;
        double a = std::abs(sd.eigenvectors(i, j));
        if (a < 1e-300) continue;
        fit.max_residual =
            std::max(fit.max_residual, std::abs(std::log(a) - (intercept + slope * r)));
      }
    }
    fits.push_back(std::move(fit));
  }
  return fits;
}

}  // namespace anderson
