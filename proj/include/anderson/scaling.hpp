#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "anderson/disorder.hpp"
#include "anderson/mc_stats.hpp"
#include "anderson/predicates.hpp"
#include "anderson/records.hpp"
#include "anderson/scale_params.hpp"

namespace anderson {

// --- scale schedule and parameter validation ---------------------------------

struct ScaleSchedule {
  std::vector<int> lengths;  // L_0 ... L_K, strictly increasing
};

// L_{k+1} = floor(L_k^alpha) + 1 with integer-exact arithmetic for alpha = 4/3
// (cube root of L^4); requires L0 > 2, alpha > 1, guards overflow at 2^31.
ScaleSchedule schedule(int L0, double alpha, int K);

struct ParamsValidation {
  bool ok = false;
  std::string violation;
  double p_min = 0.0;  // 2 alpha^2 d / (2 - alpha^2)
  double b_max = 0.0;  // ((2 - alpha^2)/alpha^2 - 2d/p) / 3
};

ParamsValidation validate_params(const ScaleParams& params);

// --- per-sample lemma suite ---------------------------------------------------

struct LemmaTally {
  long unmet = 0;
  long holds = 0;
  long violated = 0;
  long grid_limited = 0;
};

struct LemmaSuiteConfig {
  int dim = 1;
  int L = 16;
  int ell = 8;                    // sub-scale of the pair/tunneling lemmas
  std::vector<double> energies{25.0, 50.0, 75.0};
  double g = 100.0;
  GeneratorSpec generator = GeneratorSpec::iid_uniform();
  long samples = 1000;
  std::uint64_t seed = 1;
  int workers = 0;
  ScaleParams params;
  TunnelingVariant variant = TunnelingVariant::disjoint;
  bool loc_nr_lemma = true;   // localized + NR => NS, on the L-ball itself
  bool pair_lemmas = true;    // the four sub-scale implications
};

struct LemmaSuiteReport {
  std::map<std::string, LemmaTally> tallies;
  long samples = 0;
  std::vector<io::json> records;
};

LemmaSuiteReport run_lemma_suite(const LemmaSuiteConfig& cfg, bool keep_records = false);

// --- predicate battery (classify) ---------------------------------------------

struct ClassifyConfig {
  int dim = 1;
  int L = 16;
  int ell = 8;
  std::vector<double> energies{50.0};
  double g = 100.0;
  GeneratorSpec generator = GeneratorSpec::iid_uniform();
  long samples = 200;
  std::uint64_t seed = 1;
  int workers = 0;
  ScaleParams params;
  TunnelingVariant variant = TunnelingVariant::disjoint;
};

struct ClassifyReport {
  // frequency estimates keyed by predicate name
  std::vector<MonteCarloEstimate> estimates;
  std::vector<io::json> records;
  long samples = 0;
};

ClassifyReport run_classify(const ClassifyConfig& cfg, bool keep_records = false);

// --- scale induction ------------------------------------------------------------

struct InductionConfig {
  int dim = 1;
  ScaleParams params;
  int scales = 2;  // K: schedule runs L_0 .. L_K
  std::vector<double> g_grid{100.0};
  GeneratorSpec generator = GeneratorSpec::iid_uniform();
  long samples = 500;
  std::uint64_t seed = 1;
  int workers = 0;
  std::vector<double> lemma_energies;  // empty: {1/4, 1/2, 3/4} of g
  TunnelingVariant variant = TunnelingVariant::disjoint;
  bool lemma_suite = true;
  double max_eig_cost = 2e11;  // sum of n^3 over planned eigensolves
  long max_grid_points = 200000;
  bool force = false;
};

struct EventRow {
  std::string event;
  double g = 0.0;
  int k = 0;
  int L = 0;
  MonteCarloEstimate estimate;
  double target = 0.0;          // probability target tracked at this scale
  bool below_resolution = true; // target below what `samples` can resolve
  bool zero_hit_compatible = false;
};

struct InductionReport {
  ScaleSchedule sched;
  std::vector<EventRow> nloc_rows;
  std::vector<EventRow> pair_singular_rows;
  std::vector<EventRow> pair_resonant_rows;
  std::vector<EventRow> tunneling_rows;
  std::map<std::string, LemmaTally> lemma_tallies;
  long inclusion_checked = 0;
  long inclusion_counterexamples = 0;
  long inclusion_grid_limited = 0;
  long containment_checked = 0;
  long containment_counterexamples = 0;
  bool nloc_monotone_in_k = true;
  bool nloc_monotone_in_g = true;
  bool budget_exceeded = false;
  bool partial = false;
  int scales_run = 0;
  std::vector<io::json> records;
};

InductionReport run_induction(const InductionConfig& cfg, bool keep_records = false);

}  // namespace anderson
