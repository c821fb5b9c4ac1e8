#include <doctest.h>

#include <cmath>

#include "anderson/disorder.hpp"
#include "anderson/rng.hpp"
#include "oracles.hpp"

using namespace anderson;

namespace {
Site s1(int x) {
  Site s(1);
  s << x;
  return s;
}
}  // namespace

TEST_CASE("iid uniform support and determinism") {
  LatticeBall ball = LatticeBall::make(s1(0), 16);
  GeneratorSpec spec = GeneratorSpec::iid_uniform();
  PotentialField a = sample_iid(ball, spec, 3, 42);
  PotentialField b = sample_iid(ball, spec, 3, 42);
  CHECK((a.values.array() >= 0.0).all());
  CHECK((a.values.array() < 1.0).all());
  CHECK((a.values.array() == b.values.array()).all());
  PotentialField c = sample_iid(ball, spec, 4, 42);
  CHECK_FALSE((a.values.array() == c.values.array()).all());
}

TEST_CASE("values are keyed by site, not enumeration") {
  // Restriction of a big sample equals direct regeneration on the sub-ball.
  LatticeBall big = LatticeBall::make(s1(0), 20);
  LatticeBall sub = LatticeBall::make(s1(5), 4);
  GeneratorSpec spec = GeneratorSpec::iid_uniform();
  PotentialField fb = sample_iid(big, spec, 0, 9);
  PotentialField fs = sample_iid(sub, spec, 0, 9);
  for (int i = 0; i < sub.size(); ++i) CHECK(fb.at(sub.site(i)) == fs.values[i]);
}

TEST_CASE("uniformity: KS band at one site over sample indices") {
  LatticeBall ball = LatticeBall::make(s1(0), 0);
  GeneratorSpec spec = GeneratorSpec::iid_uniform();
  const long n = 100000;
  std::vector<double> draws;
  draws.reserve(n);
  for (long i = 0; i < n; ++i)
    draws.push_back(sample_iid(ball, spec, static_cast<std::uint64_t>(i), 77).values[0]);
  double d = oracles::ks_uniform(draws);
  CHECK(d < 1.358 / std::sqrt(static_cast<double>(n)));  // 95% band
}

TEST_CASE("uniformity: KS band across sites in one sample") {
  LatticeBall ball = LatticeBall::make(s1(0), 50000);
  GeneratorSpec spec = GeneratorSpec::iid_uniform();
  PotentialField f = sample_iid(ball, spec, 0, 1234);
  std::vector<double> draws(f.values.data(), f.values.data() + f.values.size());
  double d = oracles::ks_uniform(draws);
  CHECK(d < 1.358 / std::sqrt(static_cast<double>(draws.size())));
}

TEST_CASE("holder windows of the uniform marginal") {
  LatticeBall ball = LatticeBall::make(s1(0), 0);
  GeneratorSpec spec = GeneratorSpec::iid_uniform();
  const long n = 100000;
  std::vector<double> draws;
  draws.reserve(n);
  for (long i = 0; i < n; ++i)
    draws.push_back(sample_iid(ball, spec, static_cast<std::uint64_t>(i), 5).values[0]);
  for (double eps : {0.1, 0.01}) {
    for (double t : {0.0, 0.3, 0.7, 1.0 - eps}) {
      long hits = 0;
      for (double v : draws)
        if (v > t && v <= t + eps) ++hits;
      double frac = static_cast<double>(hits) / static_cast<double>(n);
      CHECK(frac <= eps + 4.0 * std::sqrt(eps / static_cast<double>(n)));
    }
  }
}

TEST_CASE("custom cdf") {
  SUBCASE("uniform knots reproduce the uniform stream") {
    LatticeBall ball = LatticeBall::make(s1(0), 8);
    auto spec = GeneratorSpec::custom_cdf({{0.0, 0.0}, {1.0, 1.0}});
    PotentialField a = sample_iid(ball, spec, 1, 3);
    PotentialField b = sample_iid(ball, GeneratorSpec::iid_uniform(), 1, 3);
    for (int i = 0; i < ball.size(); ++i) CHECK(a.values[i] == doctest::Approx(b.values[i]));
  }
  SUBCASE("validation") {
    CHECK_THROWS_AS(
        sample_iid(LatticeBall::make(s1(0), 1), GeneratorSpec::custom_cdf({{0.0, 0.0}}), 0, 0),
        std::invalid_argument);
    CHECK_THROWS_AS(sample_iid(LatticeBall::make(s1(0), 1),
                               GeneratorSpec::custom_cdf({{0.0, 0.2}, {1.0, 1.0}}), 0, 0),
                    std::invalid_argument);
  }
  SUBCASE("two-slope cdf has the right mass split") {
    // F rises to 0.8 on [0, 1/2] and to 1 on [1/2, 1].
    auto spec = GeneratorSpec::custom_cdf({{0.0, 0.0}, {0.5, 0.8}, {1.0, 1.0}});
    LatticeBall ball = LatticeBall::make(s1(0), 0);
    long below = 0;
    const long n = 20000;
    for (long i = 0; i < n; ++i)
      if (sample_iid(ball, spec, static_cast<std::uint64_t>(i), 21).values[0] <= 0.5) ++below;
    double frac = static_cast<double>(below) / n;
    CHECK(frac == doctest::Approx(0.8).epsilon(0.02));
    CHECK(spec.marginal_mean() == doctest::Approx(0.8 * 0.25 + 0.2 * 0.75));
  }
}

TEST_CASE("moving average") {
  SUBCASE("degenerate kernel equals the iid stream bit for bit") {
    LatticeBall ball = LatticeBall::make(s1(0), 12);
    auto spec = GeneratorSpec::moving_average({{Site::Zero(1), 1.0}});
    PotentialField a = sample_ma(ball, spec, 2, 5);
    PotentialField b = sample_iid(ball, GeneratorSpec::iid_uniform(), 2, 5);
    CHECK((a.values.array() == b.values.array()).all());
  }
  SUBCASE("kernel without center tap is rejected") {
    auto spec = GeneratorSpec::moving_average({{s1(1), 0.5}});
    CHECK_THROWS_AS(sample_ma(LatticeBall::make(s1(0), 2), spec, 0, 0),
                    std::invalid_argument);
    auto zero = GeneratorSpec::moving_average({{Site::Zero(1), 0.0}, {s1(1), 0.5}});
    CHECK_THROWS_AS(sample_ma(LatticeBall::make(s1(0), 2), zero, 0, 0),
                    std::invalid_argument);
  }
  SUBCASE("lag-1 autocorrelation of the default 1d kernel is 2/3") {
    auto spec = GeneratorSpec::default_moving_average(1);
    CHECK(spec.range(1) == 1);
    LatticeBall ball = LatticeBall::make(s1(0), 2000);
    PotentialField f = sample_ma(ball, spec, 0, 31);
    const int n = ball.size();
    double mean = f.values.mean();
    double c0 = 0, c1 = 0;
    for (int i = 0; i < n; ++i) c0 += (f.values[i] - mean) * (f.values[i] - mean);
    for (int i = 0; i + 1 < n; ++i) c1 += (f.values[i] - mean) * (f.values[i + 1] - mean);
    double r = c1 / c0;
    CHECK(r == doctest::Approx(2.0 / 3.0).epsilon(0.06));
  }
  SUBCASE("independence beyond twice the range") {
    auto spec = GeneratorSpec::default_moving_average(1);
    const long n = 10000;
    LatticeBall pair_ball = LatticeBall::make(s1(0), 5);
    double sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (long i = 0; i < n; ++i) {
      PotentialField f = sample_ma(pair_ball, spec, static_cast<std::uint64_t>(i), 13);
      double x = f.at(s1(-5)), y = f.at(s1(0));  // distance 5 > 2r = 2
      sx += x;
      sy += y;
      sxx += x * x;
      syy += y * y;
      sxy += x * y;
    }
    double cov = sxy / n - (sx / n) * (sy / n);
    double vx = sxx / n - (sx / n) * (sx / n);
    double vy = syy / n - (sy / n) * (sy / n);
    double corr = cov / std::sqrt(vx * vy);
    CHECK(std::abs(corr) + 1.96 / std::sqrt(static_cast<double>(n)) < 0.05);
  }
}

TEST_CASE("substreams decorrelate stages") {
  std::uint64_t a = substream(99, 1, 0, 0);
  std::uint64_t b = substream(99, 1, 1, 0);
  std::uint64_t c = substream(99, 2, 0, 0);
  CHECK(a != b);
  CHECK(a != c);
  CHECK(b != c);
}
