#pragma once

#include <cstdint>
#include <string>

namespace anderson {

// Regularized incomplete beta function I_x(a, b), continued-fraction form.
double reg_inc_beta(double a, double b, double x);

// Inverse of I_x(a, b) in x, by bisection; exact to ~1e-14.
double beta_quantile(double a, double b, double p);

// Exact (Clopper-Pearson) two-sided binomial confidence bounds.
double clopper_pearson_low(long hits, long trials, double confidence = 0.95);
double clopper_pearson_high(long hits, long trials, double confidence = 0.95);

/**
 * A Monte Carlo frequency with its exact two-sided 95% interval. Re-running
 * with the same seed reproduces `hits` exactly; the interval never uses the
 * normal approximation.
 */
struct MonteCarloEstimate {
  long trials = 0;
  long hits = 0;
  double p_hat = 0.0;
  double ci_low = 0.0;
  double ci_high = 1.0;
  std::uint64_t seed = 0;
  std::string event;
};

MonteCarloEstimate make_estimate(long trials, long hits, std::uint64_t seed,
                                 std::string event, double confidence = 0.95);

// True when the two estimates' intervals share a point.
bool ci_overlap(const MonteCarloEstimate& a, const MonteCarloEstimate& b);

}  // namespace anderson
