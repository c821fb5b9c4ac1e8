#include <doctest.h>

#include <cmath>

#include "anderson/correlators.hpp"
#include "anderson/hamiltonian.hpp"

using namespace anderson;

namespace {

Site s1(int x) {
  Site s(1);
  s << x;
  return s;
}

SpectralData random_chain(int L, double g, std::uint64_t i, std::uint64_t seed) {
  LatticeBall ball = LatticeBall::make(s1(0), L);
  PotentialField f = sample_iid(ball, GeneratorSpec::iid_uniform(), i, seed);
  return eig(assemble(ball, f, g));
}

}  // namespace

TEST_CASE("correlator examples") {
  SUBCASE("two-site chain over the full line") {
    LatticeBall seg = LatticeBall::make(s1(0), 1, BallSpec{s1(1), 1});
    PotentialField f;
    f.ball = seg;
    f.values.setZero(2);
    SpectralData sd = eig(assemble(seg, f, 1.0));
    CorrelatorRecord r = ef_correlator(sd, s1(0), s1(1), Interval{-10.0, 10.0});
    CHECK(r.Q == doctest::Approx(1.0));  // 1/2 + 1/2 from the two eigenvectors
  }
  SUBCASE("diagonal entry with the full interval is parseval") {
    SpectralData sd = random_chain(8, 3.0, 0, 12);
    Interval all{sd.eigenvalues[0] - 1, sd.eigenvalues[sd.size() - 1] + 1};
    CorrelatorRecord r = ef_correlator(sd, s1(2), s1(2), all);
    CHECK(r.Q == doctest::Approx(1.0).epsilon(1e-10));
  }
  SUBCASE("interval missing the spectrum gives zero") {
    SpectralData sd = random_chain(8, 3.0, 1, 12);
    CorrelatorRecord r = ef_correlator(sd, s1(0), s1(3), Interval{1e6, 2e6});
    CHECK(r.Q == 0.0);
  }
}

TEST_CASE("correlator range and interval monotonicity") {
  for (int i = 0; i < 30; ++i) {
    SpectralData sd = random_chain(10, 2.0, i, 77);
    Interval big{sd.eigenvalues[0], sd.eigenvalues[sd.size() - 1]};
    Interval small{big.lo + 0.25 * big.width(), big.hi - 0.25 * big.width()};
    CorrelatorRecord a = ef_correlator(sd, s1(-4), s1(5), big);
    CorrelatorRecord b = ef_correlator(sd, s1(-4), s1(5), small);
    CHECK(a.Q >= 0.0);
    CHECK(a.Q <= 1.0 + 1e-12);
    CHECK(b.Q <= a.Q + 1e-15);
  }
}

TEST_CASE("dynamical localization bound") {
  SUBCASE("strong disorder satisfies the two-term bound") {
    DlConfig cfg;
    cfg.L = 8;
    cfg.ambient_radius = 25;
    cfg.g = 100.0;
    cfg.samples = 60;
    cfg.seed = 2025;
    DlReport rep = dl_bound_check(cfg);
    // the probe balls touch the ambient edge, so only the inward bonds count
    CHECK(rep.exact_S == 2);
    CHECK(rep.separation == 34);
    CHECK(rep.ok);
    CHECK(rep.mean_Q < rep.deterministic_term + rep.pair_singular.p_hat + 3 * rep.se_Q);
    CHECK(rep.fitted_C <= 4.0);
  }
  SUBCASE("free laplacian passes only through the singular-frequency term") {
    DlConfig cfg;
    cfg.L = 8;
    cfg.ambient_radius = 25;
    cfg.g = 0.0;
    cfg.samples = 20;
    cfg.seed = 9;
    DlReport rep = dl_bound_check(cfg);
    CHECK(rep.pair_singular.p_hat == doctest::Approx(1.0));
    CHECK(rep.ok);  // f_hat ~ 1 dominates any correlator value
  }
  SUBCASE("geometry guard") {
    DlConfig cfg;
    cfg.L = 8;
    cfg.ambient_radius = 12;
    CHECK_THROWS_AS(dl_bound_check(cfg), std::invalid_argument);
  }
}

TEST_CASE("decay fits") {
  ScaleParams params;
  SUBCASE("delta eigenvector centers at its site and passes") {
    LatticeBall ball = LatticeBall::make(s1(0), 8);
    PotentialField f;
    f.ball = ball;
    f.values.resize(ball.size());
    for (int i = 0; i < ball.size(); ++i) f.values[i] = 1.0 + 0.1 * i;
    FiniteHamiltonian H = assemble(ball, f, 1.0);
    H.matrix = Eigen::MatrixXd::Zero(ball.size(), ball.size());
    for (int i = 0; i < ball.size(); ++i) H.matrix(i, i) = f.values[i];
    SpectralData sd = eig(H);
    auto fits = decay_fit(sd, params);
    REQUIRE(fits.size() == static_cast<size_t>(ball.size()));
    for (const auto& fit : fits) CHECK(fit.hard_pass);
  }
  SUBCASE("strong disorder passes the hard check, free states fail") {
    long pass = 0, total = 0;
    for (int i = 0; i < 5; ++i) {
      SpectralData sd = random_chain(44, 100.0, i, 33);
      for (const auto& fit : decay_fit(sd, params)) {
        ++total;
        if (fit.hard_pass) ++pass;
      }
    }
    CHECK(static_cast<double>(pass) / static_cast<double>(total) >= 0.99);

    LatticeBall ball = LatticeBall::make(s1(0), 44);
    PotentialField f;
    f.ball = ball;
    f.values.setZero(ball.size());
    SpectralData free_sd = eig(assemble(ball, f, 0.0));
    long fail = 0, ftotal = 0;
    double rate_sum = 0.0;
    for (const auto& fit : decay_fit(free_sd, params)) {
      ++ftotal;
      if (!fit.hard_pass) ++fail;
      rate_sum += fit.rate;
    }
    CHECK(fail * 2 > ftotal);  // discriminative power
    CHECK(std::abs(rate_sum / ftotal) < 0.2);  // fitted rates near zero
  }
}
