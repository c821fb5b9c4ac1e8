#include "anderson/scaling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "anderson/parallel.hpp"
#include "anderson/rng.hpp"
#include "anderson/spectral.hpp"

namespace anderson {

// ---------------------------------------------------------------------------
// schedule and validation
// ---------------------------------------------------------------------------

namespace {

long long icbrt(long long x) {
  long long r = static_cast<long long>(std::llround(std::cbrt(static_cast<double>(x))));
  while (r > 0 && r * r * r > x) --r;
  while ((r + 1) * (r + 1) * (r + 1) <= x) ++r;
  return r;
}

int next_scale(int L, double alpha) {
  if (std::pow(static_cast<double>(L), alpha) > 2147483600.0)
    throw std::overflow_error("schedule: scale overflows 2^31");
  long long next;
  if (std::abs(alpha - 4.0 / 3.0) < 1e-12 && L <= 55000) {
    long long L4 = static_cast<long long>(L) * L * L * L;
    next = icbrt(L4) + 1;
  } else {
    double v = std::pow(static_cast<double>(L), alpha);
    double r = std::round(v);
    if (std::abs(v - r) < 1e-9 * std::max(1.0, r)) v = r;
    next = static_cast<long long>(std::floor(v)) + 1;
  }
  if (next > (1LL << 31) - 1) throw std::overflow_error("schedule: scale overflows 2^31");
  return static_cast<int>(next);
}

constexpr std::uint64_t kTagNloc = 0x6e6c6f63;   // per-scale nonlocalization stage
constexpr std::uint64_t kTagTrans = 0x7472616e;  // per-transition stage

}  // namespace

ScaleSchedule schedule(int L0, double alpha, int K) {
  if (L0 <= 2) throw std::invalid_argument("schedule: L0 must exceed 2");
  if (!(alpha > 1.0)) throw std::invalid_argument("schedule: alpha must exceed 1");
  if (K < 0) throw std::invalid_argument("schedule: K must be >= 0");
  ScaleSchedule s;
  s.lengths.push_back(L0);
  for (int k = 0; k < K; ++k) s.lengths.push_back(next_scale(s.lengths.back(), alpha));
  return s;
}

ParamsValidation validate_params(const ScaleParams& params) {
  ParamsValidation v;
  double a2 = params.alpha * params.alpha;
  double den = 2.0 - a2;
  if (den <= 0.0) {
    v.violation = "alpha too large: 2 - alpha^2 <= 0";
    return v;
  }
  v.p_min = 2.0 * a2 * params.dim / den;
  if (!(params.p > v.p_min)) {
    std::ostringstream os;
    os << "p = " << params.p << " must exceed 2 alpha^2 d / (2 - alpha^2) = " << v.p_min
       << " (short by " << v.p_min - params.p << ")";
    v.violation = os.str();
    return v;
  }
  v.b_max = (den / a2 - 2.0 * params.dim / params.p) / 3.0;
  if (!(params.b > 0.0) || params.b > v.b_max) {
    std::ostringstream os;
    os << "b = " << params.b << " must lie in (0, " << v.b_max << "]";
    v.violation = os.str();
    return v;
  }
  v.ok = true;
  return v;
}

// ---------------------------------------------------------------------------
// lemma suite
// ---------------------------------------------------------------------------

namespace {

struct TaggedCheck {
  LemmaCheck check;
  std::optional<double> E;
};

struct SampleLemmaResults {
  std::vector<TaggedCheck> checks;
};

void tally(std::map<std::string, LemmaTally>& tallies, const LemmaCheck& c) {
  LemmaTally& t = tallies[c.lemma];
  switch (c.status) {
    case LemmaStatus::precondition_unmet:
      ++t.unmet;
      break;
    case LemmaStatus::holds:
      ++t.holds;
      break;
    case LemmaStatus::violated:
      ++t.violated;
      break;
  }
  if (c.grid_limited) ++t.grid_limited;
}

io::json lemma_record(const LemmaCheck& c, std::uint64_t seed, long sample, double g,
                      double E, bool has_E) {
  io::json j{{"schema", io::kSchemaVersion},
             {"kind", "lemma"},
             {"seed", seed},
             {"sample", sample},
             {"g", g},
             {"lemma", c.lemma},
             {"status", to_string(c.status)},
             {"gate_ok", c.gate_ok},
             {"strict_gate_ok", c.strict_gate_ok},
             {"hypothesis_ok", c.hypothesis_ok},
             {"grid_limited", c.grid_limited},
             {"witness", c.detail}};
  if (has_E) j["E"] = E;
  return j;
}

std::vector<TaggedCheck> lemma_suite_one_sample(const PotentialField& field, double g,
                                                const ScaleParams& params, int L, int ell,
                                                const std::vector<double>& energies,
                                                TunnelingVariant variant, bool loc_nr,
                                                bool pair_lemmas) {
  std::vector<TaggedCheck> out;
  SubBallCache cache(field, g, params);
  Site origin = Site::Zero(field.ball.dim());
  CachedBall& big = cache.get(origin, L);
  for (double E : energies) {
    if (loc_nr) out.push_back({check_loc_nr_ns(big.sd, E, params), E});
    if (pair_lemmas && ell < L) {
      out.push_back({check_cnr_nopair_ns(cache, origin, L, ell, E, params), E});
      out.push_back({check_ntun_nr_ns(cache, origin, L, ell, E, params, variant), E});
    }
  }
  if (pair_lemmas && ell < L) {
    out.push_back({check_nopair_loc(cache, origin, L, ell, params), std::nullopt});
    out.push_back({check_ntun_loc(cache, origin, L, ell, params, variant), std::nullopt});
  }
  return out;
}

}  // namespace

LemmaSuiteReport run_lemma_suite(const LemmaSuiteConfig& cfg, bool keep_records) {
  LemmaSuiteReport rep;
  rep.samples = cfg.samples;
  LatticeBall ball = LatticeBall::make(Site::Zero(cfg.dim), cfg.L);
  std::vector<SampleLemmaResults> slots(cfg.samples);
  parallel_for(cfg.samples, cfg.workers, [&](long i) {
    PotentialField field =
        sample_field(ball, cfg.generator, static_cast<std::uint64_t>(i), cfg.seed);
    slots[i].checks =
        lemma_suite_one_sample(field, cfg.g, cfg.params, cfg.L, cfg.ell, cfg.energies,
                               cfg.variant, cfg.loc_nr_lemma, cfg.pair_lemmas);
  });
  for (long i = 0; i < cfg.samples; ++i) {
    for (const TaggedCheck& tc : slots[i].checks) {
      tally(rep.tallies, tc.check);
      if (keep_records)
        rep.records.push_back(lemma_record(tc.check, cfg.seed, i, cfg.g,
                                           tc.E.value_or(0.0), tc.E.has_value()));
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// classify
// ---------------------------------------------------------------------------

ClassifyReport run_classify(const ClassifyConfig& cfg, bool keep_records) {
  ClassifyReport rep;
  rep.samples = cfg.samples;
  LatticeBall ball = LatticeBall::make(Site::Zero(cfg.dim), cfg.L);

  struct Row {
    std::vector<char> resonant, cnr, singular;
    std::vector<io::json> witness_per_E;
    bool localized = false, tunneling = false, mi_tunneling = false, grid_limited = false;
    io::json tunneling_witness, mi_witness, loc_witness;
  };
  std::vector<Row> slots(cfg.samples);

  auto site_json = [](const Site& s) {
    io::json a = io::json::array();
    for (int j = 0; j < s.size(); ++j) a.push_back(s[j]);
    return a;
  };

  parallel_for(cfg.samples, cfg.workers, [&](long i) {
    PotentialField field =
        sample_field(ball, cfg.generator, static_cast<std::uint64_t>(i), cfg.seed);
    SubBallCache cache(field, cfg.g, cfg.params);
    Site origin = Site::Zero(cfg.dim);
    CachedBall& big = cache.get(origin, cfg.L);
    Row& row = slots[i];
    for (double E : cfg.energies) {
      row.resonant.push_back(is_E_resonant(big.sd, E, cfg.params) ? 1 : 0);
      CnrResult cnr = is_E_CNR(cache, origin, cfg.L, E, cfg.params);
      row.cnr.push_back(cnr.cnr ? 1 : 0);
      row.singular.push_back(singularity_at(big, E, cfg.params) != Singularity::nonsingular
                                 ? 1
                                 : 0);
      row.witness_per_E.push_back(
          cnr.witness ? io::json{{"resonant_subball_center", site_json(cnr.witness->center)},
                                 {"radius", cnr.witness->radius}}
                      : io::json(nullptr));
    }
    row.localized = cached_localized(big, cfg.params);
    if (!row.localized) {
      LocResult lr = is_m_localized(big.sd, cfg.params);
      row.loc_witness = io::json{{"eigenfunction", lr.worst_j},
                                 {"x", site_json(big.sd.ball.site(lr.worst_x))},
                                 {"y", site_json(big.sd.ball.site(lr.worst_y))},
                                 {"log_margin", lr.worst_margin}};
    }
    if (cfg.ell < cfg.L) {
      TunnelingResult tun =
          is_m_tunneling(cache, origin, cfg.L, cfg.ell, cfg.params, cfg.variant);
      row.tunneling = tun.tunneling;
      if (tun.witness)
        row.tunneling_witness = io::json{{"first", site_json(tun.witness->first)},
                                         {"second", site_json(tun.witness->second)}};
      Interval hull{big.sd.eigenvalues[0] - 1.0,
                    big.sd.eigenvalues[big.sd.size() - 1] + 1.0};
      MITunnelingResult mi =
          is_mI_tunneling(cache, origin, cfg.L, cfg.ell, hull, cfg.params);
      row.mi_tunneling = mi.tunneling;
      row.grid_limited = mi.grid_limited;
      if (mi.witness)
        row.mi_witness = io::json{{"E", *mi.witness_E},
                                  {"first", site_json(mi.witness->first)},
                                  {"second", site_json(mi.witness->second)}};
    }
  });

  auto freq = [&](const std::string& name, auto&& hit_fn) {
    long hits = 0;
    for (long i = 0; i < cfg.samples; ++i)
      if (hit_fn(slots[i])) ++hits;
    rep.estimates.push_back(make_estimate(cfg.samples, hits, cfg.seed, name));
  };
  for (size_t e = 0; e < cfg.energies.size(); ++e) {
    std::ostringstream tag;
    tag << "E=" << cfg.energies[e];
    freq("resonant(" + tag.str() + ")", [&](const Row& r) { return r.resonant[e] != 0; });
    freq("cnr(" + tag.str() + ")", [&](const Row& r) { return r.cnr[e] != 0; });
    freq("singular(" + tag.str() + ")", [&](const Row& r) { return r.singular[e] != 0; });
  }
  freq("nonlocalized", [](const Row& r) { return !r.localized; });
  if (cfg.ell < cfg.L) {
    freq("tunneling", [](const Row& r) { return r.tunneling; });
    freq("mi_tunneling", [](const Row& r) { return r.mi_tunneling; });
  }

  if (keep_records) {
    for (long i = 0; i < cfg.samples; ++i) {
      const Row& r = slots[i];
      io::json verdicts;
      for (size_t e = 0; e < cfg.energies.size(); ++e) {
        std::ostringstream key;
        key << "E=" << cfg.energies[e];
        verdicts[key.str()] = io::json{{"resonant", r.resonant[e] != 0},
                                       {"cnr", r.cnr[e] != 0},
                                       {"singular", r.singular[e] != 0},
                                       {"pr_witness", r.witness_per_E[e]}};
      }
      io::json witness{{"nonlocalized", r.loc_witness},
                       {"tunneling", r.tunneling_witness},
                       {"mi_tunneling", r.mi_witness}};
      rep.records.push_back(io::json{{"schema", io::kSchemaVersion},
                                     {"kind", "classify"},
                                     {"seed", cfg.seed},
                                     {"sample", i},
                                     {"g", cfg.g},
                                     {"L", cfg.L},
                                     {"predicate", "battery"},
                                     {"verdict", verdicts},
                                     {"localized", r.localized},
                                     {"tunneling", r.tunneling},
                                     {"mi_tunneling", r.mi_tunneling},
                                     {"grid_limited", r.grid_limited},
                                     {"witness", witness}});
    }
  }
  return rep;
}

// ---------------------------------------------------------------------------
// induction driver
// ---------------------------------------------------------------------------

namespace {

double cube(double x) { return x * x * x; }

double sites_in_ball(int dim, int L) {
  double n = 1;
  for (int j = 0; j < dim; ++j) n *= 2.0 * L + 1.0;
  return n;
}

// Upper estimate of the eigensolve cost (sum of n^3) of one transition stage.
double transition_cost(int dim, int L_next, int L, long samples, bool lemma_suite,
                       const ScaleParams& params) {
  double big = cube(sites_in_ball(dim, L_next));
  double centers = sites_in_ball(dim, L_next - L);
  double subs = centers * cube(sites_in_ball(dim, L));
  double cnr = 0.0;
  if (lemma_suite) {
    for (int r = std::min(L, cnr_min_radius(L, params)); r <= L; ++r)
      cnr += sites_in_ball(dim, L - r) * cube(sites_in_ball(dim, r));
  }
  return static_cast<double>(samples) * (big + subs + cnr);
}

struct PairEvent {
  bool valid = false;
  Site u, v;
};

PairEvent placed_pair(int dim, int L_next, int L) {
  PairEvent pe;
  if (L_next <= 2 * L) return pe;  // no disjoint placement available
  pe.valid = true;
  pe.u = Site::Zero(dim);
  pe.v = Site::Zero(dim);
  pe.u[0] = -(L_next - L);
  pe.v[0] = L_next - L;
  return pe;
}

double min_spacing(const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
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

// exists E with both placed balls (E,m)-singular; tails certified as in the
// general scan.
struct PairSingularOutcome {
  bool hit = false;
  double witness_E = 0.0;
  bool grid_limited = false;
};

PairSingularOutcome pair_singular_any_E(SubBallCache& cache, const Site& u, const Site& v,
                                        int ell, const ScaleParams& params,
                                        long max_grid_points) {
  PairSingularOutcome out;
  CachedBall& bu = cache.get(u, ell);
  CachedBall& bv = cache.get(v, ell);
  double lo = std::min(bu.sd.eigenvalues[0], bv.sd.eigenvalues[0]);
  double hi = std::max(bu.sd.eigenvalues[bu.sd.size() - 1],
                       bv.sd.eigenvalues[bv.sd.size() - 1]);
  double tail = 2.0 * resonance_width(ell, params.beta);
  for (CachedBall* b : {&bu, &bv}) {
    double D = static_cast<double>(b->sd.boundary_bonds) * b->ns_certificate.sum() /
               b->ns_threshold;
    tail = std::max(tail, D);
  }
  Interval I{lo - tail, hi + tail};
  double step = 0.5 * resonance_width(ell, params.beta);
  if (I.width() / step > static_cast<double>(max_grid_points)) {
    out.grid_limited = true;
    double pad = 2.0 * resonance_width(ell, params.beta);
    I = Interval{lo - pad, hi + pad};
  }
  std::vector<const SpectralData*> sds{&bu.sd, &bv.sd};
  EnergyGrid grid = build_energy_grid(sds, I, params.beta, ell, max_grid_points);
  out.grid_limited = out.grid_limited || grid.truncated;
  for (double E : grid.points) {
    if (singularity_at(bu, E, params) == Singularity::nonsingular) continue;
    if (singularity_at(bv, E, params) == Singularity::nonsingular) continue;
    out.hit = true;
    out.witness_E = E;
    return out;
  }
  return out;
}

// Exact evaluation of "exists E making two disjoint sub-balls of both parent
// balls resonant": reduces to spectral spacings of the parents' sub-balls.
bool pair_partially_resonant_exists(SubBallCache& cache, const Site& cu, const Site& cv,
                                    int L, const ScaleParams& params) {
  std::vector<std::pair<Site, int>> subs_u, subs_v;
  for (int r = std::min(L, cnr_min_radius(L, params)); r <= L; ++r) {
    LatticeBall centers_u = LatticeBall::make(cu, L - r);
    for (int i = 0; i < centers_u.size(); ++i) subs_u.emplace_back(centers_u.site(i), r);
    LatticeBall centers_v = LatticeBall::make(cv, L - r);
    for (int i = 0; i < centers_v.size(); ++i) subs_v.emplace_back(centers_v.site(i), r);
  }
  for (const auto& [su, ru] : subs_u) {
    CachedBall& a = cache.get(su, ru);
    for (const auto& [sv, rv] : subs_v) {
      CachedBall& b = cache.get(sv, rv);
      double t = resonance_width(ru, params.beta) + resonance_width(rv, params.beta);
      if (min_spacing(a.sd.eigenvalues, b.sd.eigenvalues) < t) return true;
    }
  }
  return false;
}

struct TransSample {
  bool nloc_big = false;
  bool pair_singular = false;
  bool pair_singular_grid_limited = false;
  double pair_witness_E = 0.0;
  bool pair_resonant = false;
  bool tunneling = false;
  bool inclusion_checked = false;
  bool inclusion_counterexample = false;
  bool inclusion_grid_limited = false;
  long containment_checked = 0;
  long containment_counterexamples = 0;
  std::vector<LemmaCheck> lemmas;
};

}  // namespace

InductionReport run_induction(const InductionConfig& cfg, bool keep_records) {
  ParamsValidation pv = validate_params(cfg.params);
  if (!pv.ok) throw std::invalid_argument("run_induction: " + pv.violation);

  InductionReport rep;
  rep.sched = schedule(cfg.params.L0, cfg.params.alpha, cfg.scales);
  const auto& L = rep.sched.lengths;

  // Clamp the number of scales to the eigensolve budget.
  int K = cfg.scales;
  if (!cfg.force) {
    double cost = 0.0;
    int k_fit = 0;
    for (int k = 0; k <= cfg.scales; ++k) {
      double stage = static_cast<double>(cfg.samples) * cube(sites_in_ball(cfg.dim, L[k]));
      if (k < cfg.scales)
        stage += transition_cost(cfg.dim, L[k + 1], L[k], cfg.samples, cfg.lemma_suite,
                                 cfg.params);
      stage *= static_cast<double>(cfg.g_grid.size());
      if (cost + stage > cfg.max_eig_cost) break;
      cost += stage;
      k_fit = k;
    }
    if (k_fit < cfg.scales) {
      rep.budget_exceeded = true;
      rep.partial = true;
      K = k_fit;
    }
  }
  rep.scales_run = K;

  for (size_t gi = 0; gi < cfg.g_grid.size(); ++gi) {
    const double g = cfg.g_grid[gi];
    std::vector<double> energies = cfg.lemma_energies;
    if (energies.empty()) energies = {0.25 * g, 0.5 * g, 0.75 * g};

    // Per-scale nonlocalization estimates.
    for (int k = 0; k <= K; ++k) {
      std::uint64_t stream = substream(cfg.seed, kTagNloc, k, gi);
      LatticeBall ball = LatticeBall::make(Site::Zero(cfg.dim), L[k]);
      std::vector<char> hit(cfg.samples, 0);
      parallel_for(cfg.samples, cfg.workers, [&](long i) {
        PotentialField field =
            sample_field(ball, cfg.generator, static_cast<std::uint64_t>(i), stream);
        SpectralData sd = eig(assemble(ball, field, g));
        hit[i] = is_m_localized(sd, cfg.params).localized ? 0 : 1;
      });
      long hits = std::count(hit.begin(), hit.end(), 1);
      std::ostringstream ev;
      ev << "nloc(k=" << k << ",g=" << g << ")";
      EventRow row;
      row.event = ev.str();
      row.g = g;
      row.k = k;
      row.L = L[k];
      row.estimate = make_estimate(cfg.samples, hits, stream, ev.str());
      row.target = std::pow(static_cast<double>(L[k]),
                            -cfg.params.p * std::pow(1.0 + cfg.params.b, k));
      row.below_resolution = row.target < 1.0 / static_cast<double>(cfg.samples);
      row.zero_hit_compatible = !row.below_resolution || hits == 0;
      rep.nloc_rows.push_back(row);
      if (keep_records)
        for (long i = 0; i < cfg.samples; ++i)
          rep.records.push_back(io::json{{"schema", io::kSchemaVersion},
                                         {"kind", "event"},
                                         {"seed", stream},
                                         {"sample", i},
                                         {"g", g},
                                         {"k", k},
                                         {"L", L[k]},
                                         {"predicate", "nloc"},
                                         {"verdict", hit[i] != 0},
                                         {"witness", nullptr}});
    }

    // Transition stages: pair events, tunneling, inclusion, containment, lemmas.
    for (int k = 0; k < K; ++k) {
      std::uint64_t stream = substream(cfg.seed, kTagTrans, k, gi);
      LatticeBall big_ball = LatticeBall::make(Site::Zero(cfg.dim), L[k + 1]);
      PairEvent pe = placed_pair(cfg.dim, L[k + 1], L[k]);
      std::vector<TransSample> slots(cfg.samples);

      parallel_for(cfg.samples, cfg.workers, [&](long i) {
        TransSample& out = slots[i];
        PotentialField field =
            sample_field(big_ball, cfg.generator, static_cast<std::uint64_t>(i), stream);
        SubBallCache cache(field, g, cfg.params);
        Site origin = Site::Zero(cfg.dim);
        CachedBall& big = cache.get(origin, L[k + 1]);
        out.nloc_big = !cached_localized(big, cfg.params);

        if (pe.valid) {
          PairSingularOutcome ps =
              pair_singular_any_E(cache, pe.u, pe.v, L[k], cfg.params, cfg.max_grid_points);
          out.pair_singular = ps.hit;
          out.pair_singular_grid_limited = ps.grid_limited;
          out.pair_witness_E = ps.witness_E;
          CachedBall& bu = cache.get(pe.u, L[k]);
          CachedBall& bv = cache.get(pe.v, L[k]);
          out.pair_resonant =
              min_spacing(bu.sd.eigenvalues, bv.sd.eigenvalues) <=
              2.0 * resonance_width(L[k], cfg.params.beta);
        }

        out.tunneling = is_m_tunneling(cache, origin, L[k + 1], L[k], cfg.params,
                                       cfg.variant, cfg.force)
                            .tunneling;

        // The event inclusion only makes sense when the next ball can host a
        // disjoint pair of scale-k balls at all, i.e. L_{k+1} > 2 L_k.
        if (out.nloc_big && pe.valid) {
          out.inclusion_checked = true;
          bool r2 = false;
          {
            LatticeBall centers = LatticeBall::make(origin, L[k + 1] - L[k]);
            for (int a = 0; a < centers.size() && !r2; ++a)
              for (int c = a + 1; c < centers.size() && !r2; ++c) {
                Site su = centers.site(a), sv = centers.site(c);
                if (dist_max(su, sv) <= 2 * L[k]) continue;
                r2 = pair_partially_resonant_exists(cache, su, sv, L[k], cfg.params);
              }
          }
          bool s2 = false;
          if (!r2) {
            MITunnelingResult mi = exists_disjoint_singular_pair_any_E(
                cache, origin, L[k + 1], L[k], cfg.params, cfg.max_grid_points, cfg.force);
            s2 = mi.tunneling;
            out.inclusion_grid_limited = mi.grid_limited && !s2;
          }
          out.inclusion_counterexample = !r2 && !s2 && !out.inclusion_grid_limited;
        }

        if (k >= 1 && pe.valid) {
          std::vector<double> cont_energies = energies;
          if (out.pair_singular) cont_energies.push_back(out.pair_witness_E);
          for (double E : cont_energies) {
            for (const Site& c : {pe.u, pe.v}) {
              CachedBall& ball_c = cache.get(c, L[k]);
              if (singularity_at(ball_c, E, cfg.params) == Singularity::nonsingular)
                continue;
              if (!is_E_CNR(cache, c, L[k], E, cfg.params, nullptr, cfg.force).cnr)
                continue;
              ++out.containment_checked;
              bool tun = is_m_tunneling(cache, c, L[k], L[k - 1], cfg.params,
                                        TunnelingVariant::disjoint, cfg.force)
                             .tunneling;
              if (!tun) ++out.containment_counterexamples;
            }
          }
        }

        if (cfg.lemma_suite && k >= 1) {
          for (double E : energies) {
            out.lemmas.push_back(check_loc_nr_ns(cache.get(origin, L[k]).sd, E, cfg.params));
            out.lemmas.push_back(
                check_cnr_nopair_ns(cache, origin, L[k], L[k - 1], E, cfg.params));
            out.lemmas.push_back(
                check_ntun_nr_ns(cache, origin, L[k], L[k - 1], E, cfg.params, cfg.variant));
          }
          out.lemmas.push_back(check_nopair_loc(cache, origin, L[k], L[k - 1], cfg.params));
          out.lemmas.push_back(
              check_ntun_loc(cache, origin, L[k], L[k - 1], cfg.params, cfg.variant));
        }
      });

      long pair_s_hits = 0, pair_r_hits = 0, tun_hits = 0;
      for (long i = 0; i < cfg.samples; ++i) {
        const TransSample& s = slots[i];
        pair_s_hits += s.pair_singular ? 1 : 0;
        pair_r_hits += s.pair_resonant ? 1 : 0;
        tun_hits += s.tunneling ? 1 : 0;
        rep.inclusion_checked += s.inclusion_checked ? 1 : 0;
        rep.inclusion_counterexamples += s.inclusion_counterexample ? 1 : 0;
        rep.inclusion_grid_limited += s.inclusion_grid_limited ? 1 : 0;
        rep.containment_checked += s.containment_checked;
        rep.containment_counterexamples += s.containment_counterexamples;
        for (const LemmaCheck& c : s.lemmas) tally(rep.lemma_tallies, c);
      }

      double next_target = std::pow(static_cast<double>(L[k]),
                                    -cfg.params.p * std::pow(1.0 + cfg.params.b, k + 1));
      auto push_row = [&](const char* name, long hits, std::vector<EventRow>& dst,
                          double target) {
        std::ostringstream ev;
        ev << name << "(k=" << k << ",g=" << g << ")";
        EventRow row;
        row.event = ev.str();
        row.g = g;
        row.k = k;
        row.L = L[k];
        row.estimate = make_estimate(cfg.samples, hits, stream, ev.str());
        row.target = target;
        row.below_resolution = target < 1.0 / static_cast<double>(cfg.samples);
        row.zero_hit_compatible = !row.below_resolution || hits == 0;
        dst.push_back(row);
      };
      if (pe.valid) {
        push_row("pair_singular", pair_s_hits, rep.pair_singular_rows, 0.5 * next_target);
        push_row("pair_resonant", pair_r_hits, rep.pair_resonant_rows,
                 std::exp(-std::pow(static_cast<double>(L[k]), cfg.params.beta_prime)));
      }
      double tun_target = 0.25 * std::pow(static_cast<double>(L[k + 1]),
                                          -cfg.params.p * std::pow(1.0 + cfg.params.b, k + 1));
      push_row("tunneling", tun_hits, rep.tunneling_rows, tun_target);

      if (keep_records) {
        for (long i = 0; i < cfg.samples; ++i) {
          const TransSample& s = slots[i];
          rep.records.push_back(io::json{{"schema", io::kSchemaVersion},
                                         {"kind", "transition"},
                                         {"seed", stream},
                                         {"sample", i},
                                         {"g", g},
                                         {"k", k},
                                         {"L", L[k]},
                                         {"predicate", "transition"},
                                         {"verdict",
                                          io::json{{"nloc_next", s.nloc_big},
                                                   {"pair_singular", s.pair_singular},
                                                   {"pair_resonant", s.pair_resonant},
                                                   {"tunneling", s.tunneling}}},
                                         {"inclusion_checked", s.inclusion_checked},
                                         {"inclusion_counterexample",
                                          s.inclusion_counterexample},
                                         {"grid_limited", s.pair_singular_grid_limited ||
                                                              s.inclusion_grid_limited},
                                         {"witness", nullptr}});
          for (const LemmaCheck& c : s.lemmas)
            rep.records.push_back(lemma_record(c, stream, i, g, 0.0, false));
        }
      }
    }
  }

  // Monotonicity of the nonlocalization frequency, CI-overlap ties allowed.
  auto row_for = [&](double g, int k) -> const EventRow* {
    for (const auto& r : rep.nloc_rows)
      if (r.g == g && r.k == k) return &r;
    return nullptr;
  };
  for (double g : cfg.g_grid)
    for (int k = 0; k < K; ++k) {
      const EventRow* a = row_for(g, k);
      const EventRow* b = row_for(g, k + 1);
      if (a && b && b->estimate.p_hat > a->estimate.p_hat &&
          !ci_overlap(a->estimate, b->estimate))
        rep.nloc_monotone_in_k = false;
    }
  for (size_t gi = 0; gi + 1 < cfg.g_grid.size(); ++gi)
    for (int k = 0; k <= K; ++k) {
      const EventRow* a = row_for(cfg.g_grid[gi], k);
      const EventRow* b = row_for(cfg.g_grid[gi + 1], k);
      if (a && b && b->estimate.p_hat > a->estimate.p_hat &&
          !ci_overlap(a->estimate, b->estimate))
        rep.nloc_monotone_in_g = false;
    }
  return rep;
}

}  // namespace anderson
