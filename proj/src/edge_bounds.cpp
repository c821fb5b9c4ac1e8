#include "anderson/edge_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "anderson/hamiltonian.hpp"
#include "anderson/parallel.hpp"
#include "anderson/predicates.hpp"
#include "anderson/rng.hpp"

namespace anderson {

CtReport combes_thomas_check(const SpectralData& sd, double E) {
  CtReport rep;
  rep.eta = sd.min_gap(E);
  if (rep.eta <= 1e-12) return rep;
  rep.applicable = true;
  const int d = sd.ball.dim();
  rep.provable_regime = rep.eta <= static_cast<double>(d) * (1.0 + 1e-12);

  const int n = sd.size();
  Eigen::MatrixXd W =
      sd.eigenvectors * (1.0 / (sd.eigenvalues.array() - E)).matrix().asDiagonal();
  const auto& sites = sd.ball.sites();
  const double pref = 2.0 / rep.eta;
  for (int a = 0; a < n; ++a) {
    for (int c = a + 1; c < n; ++c) {
      int r = (sites.row(a) - sites.row(c)).cwiseAbs().maxCoeff();
      double g = std::abs(W.row(a).dot(sd.eigenvectors.row(c)));
      double rhs5 = pref * std::exp(-rep.eta * r / (5.0 * d));
      double rhs12 = pref * std::exp(-rep.eta * r / (12.0 * d));
      ++rep.checked;
      rep.worst_ratio_5d = std::max(rep.worst_ratio_5d, g / rhs5);
      rep.worst_ratio_12d = std::max(rep.worst_ratio_12d, g / rhs12);
      if (g > rhs5 * (1.0 + 1e-12)) ++rep.violations_5d;
      if (g > rhs12 * (1.0 + 1e-12)) ++rep.violations_12d;
    }
  }
  return rep;
}

EdgeReport lifshitz_stats(const EdgeConfig& cfg) {
  cfg.generator.validate(cfg.dim);
  if (!cfg.generator.nonconstant())
    throw std::invalid_argument("lifshitz_stats: generator must be nonconstant");
  if (cfg.generator.support_min() < 0.0)
    throw std::invalid_argument("lifshitz_stats: generator must be nonnegative");
  if (!(cfg.eta > 0.0)) throw std::invalid_argument("lifshitz_stats: eta must be positive");

  EdgeReport rep;
  rep.eta = cfg.eta;
  LatticeBall ball = LatticeBall::make(Site::Zero(cfg.dim), cfg.L);
  const long n = cfg.samples;

  std::vector<char> mean_hit(n, 0);
  std::vector<double> e0n(n, 0.0), e0d(n, 0.0);
  parallel_for(n, cfg.workers, [&](long i) {
    PotentialField field =
        sample_field(ball, cfg.generator, static_cast<std::uint64_t>(i), cfg.seed);
    mean_hit[i] = field.values.mean() <= 2.0 * cfg.eta ? 1 : 0;
    SpectralData neumann = eig(assemble(ball, field, 1.0, BoundaryCondition::neumann,
                                        KineticConvention::graph_laplacian));
    SpectralData dirichlet = eig(assemble(ball, field, 1.0, BoundaryCondition::dirichlet,
                                          KineticConvention::graph_laplacian));
    e0n[i] = neumann.eigenvalues[0];
    e0d[i] = dirichlet.eigenvalues[0];
  });

  long hits = std::count(mean_hit.begin(), mean_hit.end(), 1);
  std::ostringstream ev;
  ev << "mean_potential<=2eta(L=" << cfg.L << ",eta=" << cfg.eta << ")";
  rep.mean_event = make_estimate(n, hits, cfg.seed, ev.str());

  double mu = cfg.generator.marginal_mean();
  double width = cfg.generator.support_max() - cfg.generator.support_min();
  rep.hoeffding_applicable = cfg.generator.iid() && mu > 2.0 * cfg.eta && width > 0.0;
  if (rep.hoeffding_applicable) {
    double s = mu - 2.0 * cfg.eta;
    rep.hoeffding_bound =
        std::exp(-2.0 * s * s * static_cast<double>(ball.size()) / (width * width));
  }

  for (long i = 0; i < n; ++i) {
    ++rep.bracketing_checked;
    if (e0n[i] > e0d[i] + 1e-10) ++rep.bracketing_violations;
  }

  rep.e0_neumann = e0n;
  std::sort(rep.e0_neumann.begin(), rep.e0_neumann.end());
  double scale = std::pow(static_cast<double>(cfg.L), -0.5);
  for (double f : cfg.theta_factors) {
    double theta = f * scale;
    long th_hits = 0;
    for (double e : e0n)
      if (e <= theta) ++th_hits;
    std::ostringstream tev;
    tev << "E0_neumann<=theta(theta=" << theta << ")";
    rep.threshold_rows.emplace_back(theta, make_estimate(n, th_hits, cfg.seed, tev.str()));
  }
  return rep;
}

LowEnergyReport low_energy_singularity_estimate(const LowEnergyConfig& cfg) {
  cfg.generator.validate(cfg.dim);
  if (cfg.eta_grid.empty())
    throw std::invalid_argument("low_energy_singularity_estimate: empty band grid");
  for (double eta : cfg.eta_grid)
    if (!(eta > 0.0))
      throw std::invalid_argument("low_energy_singularity_estimate: bands must be positive");

  LowEnergyReport rep;
  rep.mass = cfg.C_mass * std::pow(static_cast<double>(cfg.L0), -0.5);
  LatticeBall ball = LatticeBall::make(Site::Zero(cfg.dim), cfg.L0);

  // Pilot: empirical lower spectral edge.
  std::uint64_t pilot_stream = substream(cfg.seed, 0x70696c6f);  // pilot tag
  std::vector<double> pilot_e0(cfg.pilot_samples, 0.0);
  parallel_for(cfg.pilot_samples, cfg.workers, [&](long i) {
    PotentialField field =
        sample_field(ball, cfg.generator, static_cast<std::uint64_t>(i), pilot_stream);
    pilot_e0[i] = eig(assemble(ball, field, cfg.g)).eigenvalues[0];
  });
  rep.edge = *std::min_element(pilot_e0.begin(), pilot_e0.end());

  std::vector<double> etas = cfg.eta_grid;
  std::sort(etas.begin(), etas.end());
  const double eta_max = etas.back();

  ScaleParams params = cfg.params;
  params.m = rep.mass;

  const size_t bands = etas.size();
  std::vector<std::vector<char>> hit(bands, std::vector<char>(cfg.samples, 0));
  std::vector<char> monotone_ok(cfg.samples, 1);
  parallel_for(cfg.samples, cfg.workers, [&](long i) {
    PotentialField field =
        sample_field(ball, cfg.generator, static_cast<std::uint64_t>(i), cfg.seed);
    SubBallCache cache(field, cfg.g, params);
    CachedBall& b = cache.get(Site::Zero(cfg.dim), cfg.L0);
    // One grid over the largest band; sub-bands take prefixes, so per-sample
    // hits are monotone in eta by construction.
    std::vector<const SpectralData*> sds{&b.sd};
    EnergyGrid grid = build_energy_grid(sds, Interval{rep.edge, rep.edge + eta_max},
                                        params.beta, cfg.L0, cfg.max_grid_points);
    double first_hit = std::numeric_limits<double>::infinity();
    for (double E : grid.points) {
      if (singularity_at(b, E, params) != Singularity::nonsingular) {
        first_hit = E;
        break;
      }
    }
    for (size_t bi = 0; bi < bands; ++bi)
      hit[bi][i] = first_hit <= rep.edge + etas[bi] ? 1 : 0;
    for (size_t bi = 1; bi < bands; ++bi)
      if (hit[bi - 1][i] && !hit[bi][i]) monotone_ok[i] = 0;
  });

  for (size_t bi = 0; bi < bands; ++bi) {
    long hits = std::count(hit[bi].begin(), hit[bi].end(), 1);
    std::ostringstream ev;
    ev << "band_singular(L0=" << cfg.L0 << ",eta=" << etas[bi] << ",m=" << rep.mass << ")";
    rep.band_rows.emplace_back(etas[bi], make_estimate(cfg.samples, hits, cfg.seed, ev.str()));
  }
  rep.monotone_in_eta =
      std::all_of(monotone_ok.begin(), monotone_ok.end(), [](char c) { return c != 0; });
  return rep;
}

}  // namespace anderson
