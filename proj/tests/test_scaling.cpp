#include <doctest.h>

#include <cmath>

#include "anderson/records.hpp"
#include "anderson/scaling.hpp"
#include "anderson/wegner.hpp"

using namespace anderson;

TEST_CASE("scale schedule") {
  SUBCASE("default growth 8 -> 17 -> 44") {
    ScaleSchedule s = schedule(8, 4.0 / 3.0, 2);
    REQUIRE(s.lengths.size() == 3);
    CHECK(s.lengths[0] == 8);
    CHECK(s.lengths[1] == 17);  // 8^{4/3} = 16 exactly
    CHECK(s.lengths[2] == 44);  // floor(17^{4/3}) = 43
  }
  SUBCASE("slow growth") {
    ScaleSchedule s = schedule(8, 1.01, 1);
    CHECK(s.lengths[1] == 9);  // 8^{1.01} ~ 8.17
  }
  SUBCASE("strictly increasing and recomputable") {
    ScaleSchedule s = schedule(5, 4.0 / 3.0, 4);
    for (size_t i = 1; i < s.lengths.size(); ++i) CHECK(s.lengths[i] > s.lengths[i - 1]);
    ScaleSchedule t = schedule(5, 4.0 / 3.0, 4);
    CHECK(s.lengths == t.lengths);
  }
  SUBCASE("guards") {
    CHECK_THROWS_AS(schedule(2, 4.0 / 3.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(schedule(8, 1.0, 1), std::invalid_argument);
    CHECK_THROWS_AS(schedule(1 << 25, 4.0 / 3.0, 2), std::overflow_error);
  }
}

TEST_CASE("parameter validation") {
  SUBCASE("threshold p > 16 d at alpha = 4/3") {
    ScaleParams p;
    p.dim = 1;
    ParamsValidation v = validate_params(p);
    CHECK(v.p_min == doctest::Approx(16.0));
    CHECK(v.ok);
  }
  SUBCASE("b ceiling at p = 17, d = 1") {
    ScaleParams p;
    p.p = 17.0;
    p.b = 0.002;
    ParamsValidation v = validate_params(p);
    CHECK(v.ok);
    CHECK(v.b_max == doctest::Approx(1.0 / 24.0 - 2.0 / (3.0 * 17.0)).epsilon(1e-12));
  }
  SUBCASE("p too small is refused with the shortfall") {
    ScaleParams p;
    p.p = 1.0;
    ParamsValidation v = validate_params(p);
    CHECK_FALSE(v.ok);
    CHECK(v.violation.find("16") != std::string::npos);
  }
  SUBCASE("degenerate alpha is refused") {
    ScaleParams p;
    p.alpha = std::sqrt(2.0);
    ParamsValidation v = validate_params(p);
    CHECK_FALSE(v.ok);
  }
  SUBCASE("b out of range is refused") {
    ScaleParams p;
    p.b = 0.2;
    ParamsValidation v = validate_params(p);
    CHECK_FALSE(v.ok);
  }
}

TEST_CASE("lemma suite runs clean at strong disorder") {
  LemmaSuiteConfig cfg;
  cfg.L = 16;
  cfg.ell = 8;
  cfg.g = 100.0;
  cfg.samples = 25;
  cfg.seed = 1111;
  cfg.energies = {50.0};
  cfg.params.m = 0.5;
  LemmaSuiteReport rep = run_lemma_suite(cfg, true);
  long violated = 0, total = 0;
  for (const auto& [name, t] : rep.tallies) {
    violated += t.violated;
    total += t.violated + t.holds + t.unmet;
  }
  CHECK(violated == 0);
  CHECK(total > 0);
  CHECK_FALSE(rep.records.empty());
  // records carry the stable fields
  const io::json& r = rep.records.front();
  for (const char* key : {"schema", "seed", "sample", "lemma", "status", "witness"})
    CHECK(r.contains(key));
}

TEST_CASE("classify battery shapes") {
  ClassifyConfig cfg;
  cfg.L = 8;
  cfg.ell = 4;
  cfg.g = 100.0;
  cfg.samples = 30;
  cfg.seed = 22;
  cfg.energies = {25.0, 50.0};
  ClassifyReport rep = run_classify(cfg, true);
  CHECK(rep.estimates.size() == 2 * 3 + 3);  // 3 per energy + nloc/tun/miT
  CHECK(rep.records.size() == 30);
  for (const auto& e : rep.estimates) {
    CHECK(e.trials == 30);
    CHECK(e.ci_low <= e.ci_high);
  }
}

TEST_CASE("induction driver") {
  SUBCASE("invalid parameters are refused") {
    InductionConfig cfg;
    cfg.params.p = 1.0;
    CHECK_THROWS_AS(run_induction(cfg), std::invalid_argument);
  }
  SUBCASE("zero-hit rows at strong disorder, free case saturates") {
    InductionConfig cfg;
    cfg.scales = 0;
    cfg.g_grid = {0.0, 100.0};
    cfg.samples = 60;
    cfg.seed = 777;
    cfg.lemma_suite = false;
    cfg.params.m = 0.4;
    InductionReport rep = run_induction(cfg);
    REQUIRE(rep.nloc_rows.size() == 2);
    CHECK(rep.nloc_rows[0].estimate.p_hat == doctest::Approx(1.0));  // g = 0
    CHECK(rep.nloc_rows[1].estimate.hits == 0);                      // g = 100
    CHECK(rep.nloc_rows[1].zero_hit_compatible);
    CHECK(rep.nloc_rows[1].estimate.ci_high ==
          doctest::Approx(1.0 - std::pow(0.025, 1.0 / 60.0)).epsilon(1e-9));
  }
  SUBCASE("one full transition with records") {
    InductionConfig cfg;
    cfg.scales = 1;
    cfg.g_grid = {100.0};
    cfg.samples = 20;
    cfg.seed = 555;
    cfg.params.m = 0.4;
    cfg.lemma_suite = false;  // k = 0 transition has no sub-scale suite anyway
    InductionReport rep = run_induction(cfg, true);
    CHECK(rep.scales_run == 1);
    CHECK(rep.nloc_rows.size() == 2);
    REQUIRE(rep.pair_singular_rows.size() == 1);
    REQUIRE(rep.tunneling_rows.size() == 1);
    CHECK(rep.inclusion_counterexamples == 0);
    CHECK(rep.containment_counterexamples == 0);
    CHECK(rep.nloc_monotone_in_k);
    CHECK_FALSE(rep.records.empty());
  }
  SUBCASE("budget clamps the scale count") {
    InductionConfig cfg;
    cfg.scales = 2;
    cfg.samples = 50;
    cfg.max_eig_cost = 1e6;  // far below the k = 2 requirement
    cfg.lemma_suite = false;
    InductionReport rep = run_induction(cfg);
    CHECK(rep.budget_exceeded);
    CHECK(rep.partial);
    CHECK(rep.scales_run < 2);
  }
  SUBCASE("weak disorder exercises the event-inclusion search") {
    // every sample is nonlocalized at the next scale, and every one contains
    // the resonant or singular pair the containment demands
    InductionConfig cfg;
    cfg.scales = 1;
    cfg.g_grid = {1.0};
    cfg.samples = 15;
    cfg.seed = 888;
    cfg.params.m = 0.4;
    cfg.lemma_suite = false;
    InductionReport rep = run_induction(cfg);
    CHECK(rep.nloc_rows[1].estimate.hits == 15);
    CHECK(rep.inclusion_checked == 15);
    CHECK(rep.inclusion_counterexamples == 0);
    CHECK(rep.inclusion_grid_limited == 0);
  }
  SUBCASE("intermediate disorder exercises the tunneling containment") {
    InductionConfig cfg;
    cfg.scales = 2;
    cfg.g_grid = {8.0};
    cfg.samples = 20;
    cfg.seed = 890;
    cfg.params.m = 0.4;
    cfg.lemma_suite = false;
    InductionReport rep = run_induction(cfg);
    CHECK(rep.containment_checked > 0);
    CHECK(rep.containment_counterexamples == 0);
    CHECK(rep.inclusion_checked > 0);
    CHECK(rep.inclusion_counterexamples == 0);
  }
  SUBCASE("pair-resonance event matches the spacing statistics module") {
    // the induction's placed-pair event and the standalone spacing estimator
    // sample the same law at matched geometry
    InductionConfig cfg;
    cfg.scales = 1;
    cfg.g_grid = {1.0};
    cfg.samples = 400;
    cfg.seed = 4321;
    cfg.params.m = 0.4;
    cfg.lemma_suite = false;
    InductionReport rep = run_induction(cfg);
    REQUIRE(rep.pair_resonant_rows.size() == 1);
    WegnerConfig wc;
    wc.dim = 1;
    wc.L = 8;
    wc.g = 1.0;
    wc.samples = 400;
    wc.seed = 1234;
    MonteCarloEstimate spacing = estimate_pair_resonance(wc, 18);
    CHECK(ci_overlap(rep.pair_resonant_rows[0].estimate, spacing));
  }
  SUBCASE("worker count does not change any verdict") {
    InductionConfig cfg;
    cfg.scales = 1;
    cfg.samples = 12;
    cfg.seed = 4242;
    cfg.params.m = 0.4;
    cfg.lemma_suite = false;
    cfg.workers = 1;
    InductionReport a = run_induction(cfg, true);
    cfg.workers = 3;
    InductionReport b = run_induction(cfg, true);
    REQUIRE(a.records.size() == b.records.size());
    for (size_t i = 0; i < a.records.size(); ++i) CHECK(a.records[i] == b.records[i]);
    CHECK(a.nloc_rows[1].estimate.hits == b.nloc_rows[1].estimate.hits);
  }
}

TEST_CASE("generator and parameter json round-trips") {
  SUBCASE("moving-average kernel") {
    auto spec = GeneratorSpec::default_moving_average(2);
    io::json j = io::generator_to_json(spec);
    GeneratorSpec back = io::generator_from_json(j, 2);
    REQUIRE(back.kernel.size() == spec.kernel.size());
    for (size_t i = 0; i < spec.kernel.size(); ++i) {
      CHECK((back.kernel[i].first.array() == spec.kernel[i].first.array()).all());
      CHECK(back.kernel[i].second == spec.kernel[i].second);
    }
  }
  SUBCASE("custom cdf knots") {
    auto spec = GeneratorSpec::custom_cdf({{0.0, 0.0}, {0.5, 0.8}, {1.0, 1.0}});
    GeneratorSpec back = io::generator_from_json(io::generator_to_json(spec), 1);
    CHECK(back.cdf_knots == spec.cdf_knots);
  }
  SUBCASE("scale parameters") {
    ScaleParams p;
    p.L0 = 11;
    p.m = 0.7;
    p.p = 33.0;
    ScaleParams back = io::params_from_json(io::params_to_json(p));
    CHECK(back.L0 == 11);
    CHECK(back.m == 0.7);
    CHECK(back.p == 33.0);
    CHECK(back.alpha == p.alpha);
  }
}

TEST_CASE("two-dimensional induction transition") {
  InductionConfig cfg;
  cfg.dim = 2;
  cfg.params.L0 = 3;
  cfg.params.dim = 2;
  cfg.params.m = 0.4;
  cfg.params.p = 40.0;  // the d = 2 floor is p > 32
  cfg.params.b = 0.005;
  cfg.scales = 1;
  cfg.g_grid = {100.0};
  cfg.samples = 6;
  cfg.seed = 999;
  cfg.lemma_suite = false;
  InductionReport rep = run_induction(cfg, true);
  CHECK(rep.scales_run == 1);
  CHECK(rep.nloc_rows.size() == 2);
  CHECK(rep.tunneling_rows.size() == 1);
  CHECK(rep.inclusion_counterexamples == 0);
  long lemma_violated = 0;
  for (const auto& [name, t] : rep.lemma_tallies) lemma_violated += t.violated;
  CHECK(lemma_violated == 0);
}
