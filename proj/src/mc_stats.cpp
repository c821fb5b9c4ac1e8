#include "anderson/mc_stats.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace anderson {

namespace {

// Lentz continued fraction for the incomplete beta.
double betacf(double a, double b, double x) {
  const double tiny = 1e-300;
  const int max_iter = 500;
  double qab = a + b, qap = a + 1.0, qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < 1e-15) break;
  }
  return h;
}

}  // namespace

double reg_inc_beta(double a, double b, double x) {
  if (!(a > 0.0 && b > 0.0)) throw std::invalid_argument("reg_inc_beta: a, b must be > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  double ln_front =
      std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) + a * std::log(x) + b * std::log1p(-x);
  double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * betacf(a, b, x) / a;
  return 1.0 - front * betacf(b, a, 1.0 - x) / b;
}

double beta_quantile(double a, double b, double p) {
  if (p <= 0.0) return 0.0;
  if (p >= 1.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int i = 0; i < 200; ++i) {
    double mid = 0.5 * (lo + hi);
    if (reg_inc_beta(a, b, mid) < p)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

double clopper_pearson_low(long hits, long trials, double confidence) {
  if (trials <= 0 || hits < 0 || hits > trials)
    throw std::invalid_argument("clopper_pearson_low: bad counts");
  if (hits == 0) return 0.0;
  double alpha = 1.0 - confidence;
  return beta_quantile(static_cast<double>(hits), static_cast<double>(trials - hits + 1),
                       alpha / 2.0);
}

double clopper_pearson_high(long hits, long trials, double confidence) {
  if (trials <= 0 || hits < 0 || hits > trials)
    throw std::invalid_argument("clopper_pearson_high: bad counts");
  if (hits == trials) return 1.0;
  double alpha = 1.0 - confidence;
  return beta_quantile(static_cast<double>(hits + 1), static_cast<double>(trials - hits),
                       1.0 - alpha / 2.0);
}

MonteCarloEstimate make_estimate(long trials, long hits, std::uint64_t seed, std::string event,
                                 double confidence) {
  MonteCarloEstimate e;
  e.trials = trials;
  e.hits = hits;
  e.p_hat = trials > 0 ? static_cast<double>(hits) / static_cast<double>(trials) : 0.0;
  e.ci_low = clopper_pearson_low(hits, trials, confidence);
  e.ci_high = clopper_pearson_high(hits, trials, confidence);
  e.seed = seed;
  e.event = std::move(event);
  return e;
}

bool ci_overlap(const MonteCarloEstimate& a, const MonteCarloEstimate& b) {
  return a.ci_low <= b.ci_high && b.ci_low <= a.ci_high;
}

}  // namespace anderson
