#include "anderson/predicates.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace anderson {

// ---------------------------------------------------------------------------
// SubBallCache
// ---------------------------------------------------------------------------

SubBallCache::SubBallCache(const PotentialField& field, double g, const ScaleParams& params,
                           BoundaryCondition bc, KineticConvention conv)
    : field_(&field), g_(g), params_(params), bc_(bc), conv_(conv) {}

CachedBall& SubBallCache::get(const Site& center, int radius) {
  std::vector<int> key(center.data(), center.data() + center.size());
  auto it = cache_.find({key, radius});
  if (it != cache_.end()) return *it->second;

  // The sample's own ball is a free lattice ball; proper sub-balls are
  // clipped relatives of it, with the boundary restricted accordingly.
  const bool whole_field = radius == field_->ball.radius() &&
                           (center.array() == field_->ball.center().array()).all();
  LatticeBall ball = whole_field
                         ? LatticeBall::make(center, radius)
                         : LatticeBall::make(center, radius, field_->ball.spec());
  FiniteHamiltonian H = assemble(ball, *field_, g_, bc_, conv_);
  auto entry = std::make_unique<CachedBall>();
  entry->sd = eig(H);
  ++eigensolves_;

  const int n = entry->sd.size();
  entry->pair_floor = distance_floor(radius, params_);
  entry->res_width = resonance_width(radius, params_.beta);
  entry->ns_threshold = std::exp(2.0 * std::pow(static_cast<double>(radius), params_.beta));
  const double gamma = gamma_mass(params_.m, radius, params_.tau);

  entry->ns_certificate = Eigen::VectorXd::Zero(n);
  const auto& U = entry->sd.eigenvectors;
  const auto& sites = ball.sites();
  for (int a = 0; a < n; ++a) {
    for (int c = a + 1; c < n; ++c) {
      int r = (sites.row(a) - sites.row(c)).cwiseAbs().maxCoeff();
      if (r < entry->pair_floor) continue;
      double w = std::exp(gamma * r);
      for (int j = 0; j < n; ++j) {
        double v = std::abs(U(a, j) * U(c, j)) * w;
        if (v > entry->ns_certificate[j]) entry->ns_certificate[j] = v;
      }
    }
  }

  auto [pos, ok] = cache_.emplace(std::make_pair(std::move(key), radius), std::move(entry));
  (void)ok;
  return *pos->second;
}

// ---------------------------------------------------------------------------
// elementary predicates
// ---------------------------------------------------------------------------

bool is_E_resonant(const SpectralData& sd, double E, const ScaleParams& params) {
  return sd.min_gap(E) < resonance_width(sd.ball.radius(), params.beta);
}

namespace {

// Sub-ball centers v with B_l(v) inside the (unclipped) cube of B_L(u).
LatticeBall center_region(const Site& u, int L, int ell) {
  return LatticeBall::make(u, std::max(0, L - ell));
}

long count_subball_solves(int d, int L, const std::vector<int>& radii) {
  long total = 0;
  for (int ell : radii) {
    long centers = 1;
    for (int j = 0; j < d; ++j) centers *= 2L * (L - ell) + 1;
    total += centers;
  }
  return total;
}

double subball_solve_cost(int d, int L, const std::vector<int>& radii) {
  double total = 0;
  for (int ell : radii) {
    double centers = 1, sites = 1;
    for (int j = 0; j < d; ++j) {
      centers *= 2.0 * (L - ell) + 1.0;
      sites *= 2.0 * ell + 1.0;
    }
    total += centers * sites * sites * sites;
  }
  return total;
}

constexpr double kMaxScanCost = 2e12;  // sum of n^3 over a scan's eigensolves

}  // namespace

CnrResult is_E_CNR(SubBallCache& cache, const Site& center, int L, double E,
                   const ScaleParams& params, const std::vector<int>* radius_set,
                   bool force) {
  std::vector<int> radii;
  if (radius_set) {
    radii = *radius_set;
  } else {
    for (int ell = std::min(L, cnr_min_radius(L, params)); ell <= L; ++ell)
      radii.push_back(ell);
  }
  if (!force && (count_subball_solves(static_cast<int>(center.size()), L, radii) > 1000000 ||
                 subball_solve_cost(static_cast<int>(center.size()), L, radii) > kMaxScanCost))
    throw CostGuardError("is_E_CNR: sub-ball budget exceeded; pass force to override");

  CnrResult res;
  for (int ell : radii) {
    LatticeBall centers = center_region(center, L, ell);
    for (int i = 0; i < centers.size(); ++i) {
      Site v = centers.site(i);
      CachedBall& sub = cache.get(v, ell);
      ++res.scanned;
      if (is_E_resonant(sub.sd, E, params)) {
        res.cnr = false;
        res.witness = SubBallWitness{v, ell};
        return res;
      }
    }
  }
  return res;
}

NsResult is_Em_nonsingular(const SpectralData& sd, double E, const ScaleParams& params) {
  if (sd.min_gap(E) <= 1e-12)
    throw ResonanceError("is_Em_nonsingular: energy within 1e-12 of the spectrum");

  NsResult res;
  if (sd.boundary_bonds == 0) return res;  // |bd B| = 0: vacuously nonsingular

  const int L = sd.ball.radius();
  const int floor = distance_floor(L, params);
  const double gamma = gamma_mass(params.m, L, params.tau);
  const double two_lbeta = 2.0 * std::pow(static_cast<double>(L), params.beta);
  const double log_bonds = std::log(static_cast<double>(sd.boundary_bonds));

  const int n = sd.size();
  Eigen::MatrixXd W =
      sd.eigenvectors * (1.0 / (sd.eigenvalues.array() - E)).matrix().asDiagonal();

  const auto& sites = sd.ball.sites();
  for (int a = 0; a < n; ++a) {
    for (int c = a + 1; c < n; ++c) {
      int r = (sites.row(a) - sites.row(c)).cwiseAbs().maxCoeff();
      if (r < floor) continue;
      ++res.pairs;
      double g = std::abs(W.row(a).dot(sd.eigenvectors.row(c)));
      double margin = std::log(g) + log_bonds - (-gamma * r + two_lbeta);
      if (margin > res.worst_margin) {
        res.worst_margin = margin;
        res.worst_x = a;
        res.worst_y = c;
      }
    }
  }
  res.nonsingular = !(res.worst_margin > 0.0);  // ties stay nonsingular
  return res;
}

Singularity singularity_at(CachedBall& ball, double E, const ScaleParams& params) {
  const SpectralData& sd = ball.sd;
  if (sd.boundary_bonds == 0) return Singularity::nonsingular;
  if (sd.min_gap(E) <= 1e-12) return Singularity::resonant;

  // Certificate: |bd B| sum_j A_j / |E_j - E| <= e^{2 L^beta} forces every
  // pair bound by the triangle inequality on the eigen-expansion.
  double cert = (ball.ns_certificate.array() / (sd.eigenvalues.array() - E).abs()).sum() *
                static_cast<double>(sd.boundary_bonds);
  if (cert <= ball.ns_threshold) return Singularity::nonsingular;

  NsResult exact = is_Em_nonsingular(sd, E, params);
  return exact.nonsingular ? Singularity::nonsingular : Singularity::singular;
}

LocResult is_m_localized(const SpectralData& sd, const ScaleParams& params) {
  const int L = sd.ball.radius();
  const int floor = distance_floor(L, params);
  const double gamma = gamma_mass(params.m, L, params.tau);
  const int n = sd.size();
  const auto& sites = sd.ball.sites();
  const auto& U = sd.eigenvectors;

  LocResult res;
  for (int a = 0; a < n; ++a) {
    for (int c = a + 1; c < n; ++c) {
      int r = (sites.row(a) - sites.row(c)).cwiseAbs().maxCoeff();
      if (r < floor) continue;
      double bound = gamma * r;
      for (int j = 0; j < n; ++j) {
        double ua = std::abs(U(a, j)), uc = std::abs(U(c, j));
        if (ua <= kPsiFloor) ua = 0.0;
        if (uc <= kPsiFloor) uc = 0.0;
        double prod = ua * uc;
        double margin = std::log(prod) + bound;
        if (margin > res.worst_margin) {
          res.worst_margin = margin;
          res.worst_j = j;
          res.worst_x = a;
          res.worst_y = c;
        }
      }
    }
  }
  res.localized = !(res.worst_margin > 0.0);
  return res;
}

bool cached_localized(CachedBall& ball, const ScaleParams& params) {
  if (!ball.localized) ball.localized = is_m_localized(ball.sd, params).localized;
  return *ball.localized;
}

TunnelingResult is_m_tunneling(SubBallCache& cache, const Site& center, int L, int ell,
                               const ScaleParams& params, TunnelingVariant variant,
                               bool force) {
  LatticeBall centers = center_region(center, L, ell);
  if (!force && (centers.size() > 1000000 ||
                 subball_solve_cost(static_cast<int>(center.size()), L, {ell}) > kMaxScanCost))
    throw CostGuardError("is_m_tunneling: sub-ball budget exceeded; pass force to override");

  TunnelingResult res;
  std::vector<Site> nloc;
  for (int i = 0; i < centers.size(); ++i) {
    Site v = centers.site(i);
    ++res.scanned;
    if (cached_localized(cache.get(v, ell), params)) continue;
    for (const Site& w : nloc) {
      int dvw = dist_max(v, w);
      bool pair = (variant == TunnelingVariant::disjoint) ? (dvw > 2 * ell)
                                                          : (dvw <= 3 * ell);
      if (pair) {
        res.tunneling = true;
        res.witness = std::make_pair(w, v);
        return res;
      }
    }
    nloc.push_back(std::move(v));
  }
  return res;
}

// ---------------------------------------------------------------------------
// energy scans
// ---------------------------------------------------------------------------

EnergyGrid build_energy_grid(const std::vector<const SpectralData*>& balls, Interval I,
                             double beta, int ell, long max_points) {
  EnergyGrid grid;
  std::vector<double> eigs;
  for (const SpectralData* sd : balls)
    for (int j = 0; j < sd->size(); ++j) {
      double e = sd->eigenvalues[j];
      if (I.contains(e)) eigs.push_back(e);
    }
  std::sort(eigs.begin(), eigs.end());

  grid.points = eigs;
  for (size_t j = 1; j < eigs.size(); ++j)
    grid.points.push_back(0.5 * (eigs[j - 1] + eigs[j]));

  double step = 0.5 * resonance_width(ell, beta);
  if (I.width() > 0) {
    long uniform = static_cast<long>(I.width() / step) + 1;
    if (uniform > max_points) {
      step = I.width() / static_cast<double>(max_points);
      grid.truncated = true;
    }
    for (double e = I.lo; e <= I.hi; e += step) grid.points.push_back(e);
    grid.points.push_back(I.hi);
  } else {
    grid.points.push_back(I.lo);
  }
  std::sort(grid.points.begin(), grid.points.end());
  grid.points.erase(std::unique(grid.points.begin(), grid.points.end()), grid.points.end());
  return grid;
}

namespace {

struct PairScanSetup {
  std::vector<Site> centers;
  std::vector<std::pair<int, int>> disjoint_pairs;  // indices into centers
  std::vector<CachedBall*> balls;
};

PairScanSetup disjoint_pair_setup(const Site& center, int L, int ell, bool force) {
  PairScanSetup s;
  LatticeBall region = center_region(center, L, ell);
  if (!force && (region.size() > 4096 ||
                 subball_solve_cost(static_cast<int>(center.size()), L, {ell}) > kMaxScanCost))
    throw CostGuardError("singular-pair scan: too many sub-ball centers; pass force");
  for (int i = 0; i < region.size(); ++i) s.centers.push_back(region.site(i));
  for (size_t i = 0; i < s.centers.size(); ++i)
    for (size_t j = i + 1; j < s.centers.size(); ++j)
      if (dist_max(s.centers[i], s.centers[j]) > 2 * ell) s.disjoint_pairs.emplace_back(i, j);
  s.balls.resize(s.centers.size(), nullptr);
  return s;
}

// Indices of centers that belong to at least one disjoint pair; only those
// sub-balls ever need an eigensolve.
std::vector<char> relevant_mask(const PairScanSetup& s) {
  std::vector<char> mask(s.centers.size(), 0);
  for (auto [i, j] : s.disjoint_pairs) mask[i] = mask[j] = 1;
  return mask;
}

bool scan_grid_for_pair(SubBallCache& cache, PairScanSetup& s, const std::vector<char>& mask,
                        int ell, const ScaleParams& params,
                        const std::vector<double>& energies, MITunnelingResult& out) {
  std::vector<Singularity> flag(s.centers.size());
  for (double E : energies) {
    // Lazy per-center singularity with short-circuit across the pair list.
    std::fill(flag.begin(), flag.end(), Singularity::nonsingular);
    std::vector<char> known(s.centers.size(), 0);
    auto singular = [&](size_t i) {
      if (!known[i]) {
        if (!s.balls[i]) s.balls[i] = &cache.get(s.centers[i], ell);
        flag[i] = singularity_at(*s.balls[i], E, params);
        known[i] = 1;
      }
      return flag[i] != Singularity::nonsingular;
    };
    for (auto [i, j] : s.disjoint_pairs) {
      if (!mask[i] || !mask[j]) continue;
      if (singular(i) && singular(j)) {
        out.tunneling = true;
        out.witness_E = E;
        out.witness = std::make_pair(s.centers[i], s.centers[j]);
        return true;
      }
    }
  }
  return false;
}

}  // namespace

MITunnelingResult is_mI_tunneling(SubBallCache& cache, const Site& center, int L, int ell,
                                  Interval I, const ScaleParams& params,
                                  long max_grid_points, bool force) {
  if (!(I.hi >= I.lo)) throw std::invalid_argument("is_mI_tunneling: empty energy interval");
  PairScanSetup s = disjoint_pair_setup(center, L, ell, force);
  MITunnelingResult res;
  res.scanned = I;
  if (s.disjoint_pairs.empty()) return res;

  auto mask = relevant_mask(s);
  std::vector<const SpectralData*> sds;
  for (size_t i = 0; i < s.centers.size(); ++i)
    if (mask[i]) {
      s.balls[i] = &cache.get(s.centers[i], ell);
      sds.push_back(&s.balls[i]->sd);
    }
  EnergyGrid grid = build_energy_grid(sds, I, params.beta, ell, max_grid_points);
  res.grid_limited = grid.truncated;
  scan_grid_for_pair(cache, s, mask, ell, params, grid.points, res);
  return res;
}

MITunnelingResult exists_disjoint_singular_pair_any_E(SubBallCache& cache, const Site& center,
                                                      int L, int ell,
                                                      const ScaleParams& params,
                                                      long max_grid_points, bool force) {
  PairScanSetup s = disjoint_pair_setup(center, L, ell, force);
  MITunnelingResult res;
  if (s.disjoint_pairs.empty()) return res;

  auto mask = relevant_mask(s);
  std::vector<const SpectralData*> sds;
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  double tail = 0.0;
  for (size_t i = 0; i < s.centers.size(); ++i) {
    if (!mask[i]) continue;
    s.balls[i] = &cache.get(s.centers[i], ell);
    CachedBall& b = *s.balls[i];
    sds.push_back(&b.sd);
    lo = std::min(lo, b.sd.eigenvalues[0]);
    hi = std::max(hi, b.sd.eigenvalues[b.sd.size() - 1]);
    // Beyond this distance from the hull, the certificate makes the ball
    // nonsingular for every energy (the bound is monotone in the gap).
    double D = static_cast<double>(b.sd.boundary_bonds) * b.ns_certificate.sum() /
               b.ns_threshold;
    tail = std::max(tail, D);
  }
  tail = std::max(tail, 2.0 * resonance_width(ell, params.beta));

  Interval I{lo - tail, hi + tail};
  double step = 0.5 * resonance_width(ell, params.beta);
  if (I.width() / step > static_cast<double>(max_grid_points)) {
    res.grid_limited = true;
    I = Interval{lo - 2.0 * resonance_width(ell, params.beta),
                 hi + 2.0 * resonance_width(ell, params.beta)};
  }
  res.scanned = I;
  EnergyGrid grid = build_energy_grid(sds, I, params.beta, ell, max_grid_points);
  res.grid_limited = res.grid_limited || grid.truncated;
  scan_grid_for_pair(cache, s, mask, ell, params, grid.points, res);
  return res;
}

// ---------------------------------------------------------------------------
// deterministic implications
// ---------------------------------------------------------------------------

const char* to_string(LemmaStatus s) {
  switch (s) {
    case LemmaStatus::precondition_unmet:
      return "unmet";
    case LemmaStatus::holds:
      return "holds";
    case LemmaStatus::violated:
      return "VIOLATED";
  }
  return "?";
}

namespace {

std::string ns_witness_text(const SpectralData& sd, const NsResult& ns) {
  std::ostringstream os;
  os << "worst pair (" << sd.ball.sites().row(ns.worst_x) << ") - ("
     << sd.ball.sites().row(ns.worst_y) << "), log-margin " << ns.worst_margin;
  return os.str();
}

bool volume_gate(int L, int d, double beta) {
  return d * std::log(2.0 * L + 1.0) <= std::pow(static_cast<double>(L), beta);
}

bool strict_volume_gate(const SpectralData& sd, double beta) {
  int L = sd.ball.radius();
  return std::log(static_cast<double>(std::max(1L, sd.boundary_bonds))) +
             sd.ball.dim() * std::log(2.0 * L + 1.0) <=
         std::pow(static_cast<double>(L), beta);
}

}  // namespace

LemmaCheck check_loc_nr_ns(const SpectralData& sd, double E, const ScaleParams& params) {
  LemmaCheck c;
  c.lemma = "loc_nr_ns";
  const int L = sd.ball.radius();
  c.gate_ok = volume_gate(L, sd.ball.dim(), params.beta) &&
              sd.min_gap(E) > 1e-12;
  c.strict_gate_ok = c.gate_ok && strict_volume_gate(sd, params.beta);
  if (!c.gate_ok) {
    c.detail = "volume gate or spectral proximity";
    return c;
  }
  bool nr = !is_E_resonant(sd, E, params);
  bool loc = is_m_localized(sd, params).localized;
  c.hypothesis_ok = nr && loc;
  if (!c.hypothesis_ok) {
    c.status = LemmaStatus::precondition_unmet;
    c.detail = nr ? "ball not localized" : "ball resonant";
    return c;
  }
  NsResult ns = is_Em_nonsingular(sd, E, params);
  c.status = ns.nonsingular ? LemmaStatus::holds : LemmaStatus::violated;
  if (!ns.nonsingular) c.detail = ns_witness_text(sd, ns);
  return c;
}

LemmaCheck check_cnr_nopair_ns(SubBallCache& cache, const Site& center, int L, int ell,
                               double E, const ScaleParams& params) {
  LemmaCheck c;
  c.lemma = "cnr_nopair_ns";
  CachedBall& big = cache.get(center, L);
  c.gate_ok = volume_gate(L, static_cast<int>(center.size()), params.beta) &&
              big.sd.min_gap(E) > 1e-12;
  c.strict_gate_ok = c.gate_ok && strict_volume_gate(big.sd, params.beta);
  if (!c.gate_ok) {
    c.detail = "volume gate or spectral proximity";
    return c;
  }

  bool cnr = is_E_CNR(cache, center, L, E, params).cnr;
  bool nopair = true;
  if (cnr) {
    PairScanSetup s = disjoint_pair_setup(center, L, ell, false);
    auto mask = relevant_mask(s);
    MITunnelingResult tmp;
    std::vector<double> one{E};
    nopair = !scan_grid_for_pair(cache, s, mask, ell, params, one, tmp);
  }
  c.hypothesis_ok = cnr && nopair;
  if (!c.hypothesis_ok) {
    c.detail = cnr ? "disjoint singular pair present" : "ball not completely nonresonant";
    return c;
  }
  NsResult ns = is_Em_nonsingular(big.sd, E, params);
  c.status = ns.nonsingular ? LemmaStatus::holds : LemmaStatus::violated;
  if (!ns.nonsingular) c.detail = ns_witness_text(big.sd, ns);
  return c;
}

LemmaCheck check_nopair_loc(SubBallCache& cache, const Site& center, int L, int ell,
                            const ScaleParams& params) {
  LemmaCheck c;
  c.lemma = "nopair_loc";
  c.gate_ok = true;
  c.strict_gate_ok = true;
  MITunnelingResult pair = exists_disjoint_singular_pair_any_E(cache, center, L, ell, params);
  c.grid_limited = pair.grid_limited;
  c.hypothesis_ok = !pair.tunneling;
  if (!c.hypothesis_ok) {
    c.detail = "disjoint singular pair present";
    return c;
  }
  CachedBall& big = cache.get(center, L);
  LocResult loc = is_m_localized(big.sd, params);
  c.status = loc.localized ? LemmaStatus::holds : LemmaStatus::violated;
  if (!loc.localized) {
    std::ostringstream os;
    os << "eigenfunction " << loc.worst_j << " log-margin " << loc.worst_margin;
    c.detail = os.str();
  }
  return c;
}

LemmaCheck check_ntun_nr_ns(SubBallCache& cache, const Site& center, int L, int ell,
                            double E, const ScaleParams& params, TunnelingVariant variant) {
  LemmaCheck c;
  c.lemma = variant == TunnelingVariant::disjoint ? "ntun_nr_ns" : "ntun_nr_ns_3ell";
  CachedBall& big = cache.get(center, L);
  c.gate_ok = volume_gate(L, static_cast<int>(center.size()), params.beta) &&
              big.sd.min_gap(E) > 1e-12;
  c.strict_gate_ok = c.gate_ok && strict_volume_gate(big.sd, params.beta);
  if (!c.gate_ok) {
    c.detail = "volume gate or spectral proximity";
    return c;
  }
  bool nr = !is_E_resonant(big.sd, E, params);
  bool ntun = !is_m_tunneling(cache, center, L, ell, params, variant).tunneling;
  c.hypothesis_ok = nr && ntun;
  if (!c.hypothesis_ok) {
    c.status = LemmaStatus::precondition_unmet;
    c.detail = nr ? "ball tunneling" : "ball resonant";
    return c;
  }
  NsResult ns = is_Em_nonsingular(big.sd, E, params);
  c.status = ns.nonsingular ? LemmaStatus::holds : LemmaStatus::violated;
  if (!ns.nonsingular) c.detail = ns_witness_text(big.sd, ns);
  return c;
}

LemmaCheck check_ntun_loc(SubBallCache& cache, const Site& center, int L, int ell,
                          const ScaleParams& params, TunnelingVariant variant) {
  LemmaCheck c;
  c.lemma = variant == TunnelingVariant::disjoint ? "ntun_loc" : "ntun_loc_3ell";
  c.gate_ok = true;
  c.strict_gate_ok = true;
  c.hypothesis_ok = !is_m_tunneling(cache, center, L, ell, params, variant).tunneling;
  if (!c.hypothesis_ok) {
    c.detail = "ball tunneling";
    return c;
  }
  CachedBall& big = cache.get(center, L);
  LocResult loc = is_m_localized(big.sd, params);
  c.status = loc.localized ? LemmaStatus::holds : LemmaStatus::violated;
  if (!loc.localized) {
    std::ostringstream os;
    os << "eigenfunction " << loc.worst_j << " log-margin " << loc.worst_margin;
    c.detail = os.str();
  }
  return c;
}

}  // namespace anderson
