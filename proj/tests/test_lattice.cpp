#include <doctest.h>

#include "anderson/lattice.hpp"
#include "oracles.hpp"

using namespace anderson;

namespace {
Site site1(int x) {
  Site s(1);
  s << x;
  return s;
}
Site site2(int x, int y) {
  Site s(2);
  s << x, y;
  return s;
}
}  // namespace

TEST_CASE("ball site counts") {
  CHECK(ball_sites(site1(0), 2, 1).size() == 5);
  CHECK(ball_sites(site2(0, 0), 1, 2).size() == 9);
  Site c3 = Site::Zero(3);
  CHECK(ball_sites(c3, 2, 3).size() == 125);
}

TEST_CASE("distances") {
  CHECK(dist_max(site2(0, 0), site2(3, -2)) == 3);
  CHECK(dist_graph(site2(0, 0), site2(3, -2)) == 5);
  CHECK(dist_max(site2(1, 1), site2(1, 1)) == 0);
  CHECK(dist_graph(site2(1, 1), site2(1, 1)) == 0);
  CHECK(dist_max(site1(0), site1(7)) == 7);
  CHECK(dist_graph(site1(0), site1(7)) == 7);
  CHECK_THROWS_AS(dist_max(site1(0), site2(0, 0)), std::invalid_argument);
}

TEST_CASE("norm equivalence on random pairs") {
  std::mt19937_64 rng(11);
  std::uniform_int_distribution<int> coord(-20, 20);
  for (int d = 1; d <= 3; ++d) {
    for (int trial = 0; trial < 200; ++trial) {
      Site x(d), y(d);
      for (int j = 0; j < d; ++j) {
        x[j] = coord(rng);
        y[j] = coord(rng);
      }
      int dm = dist_max(x, y), dg = dist_graph(x, y);
      CHECK(dm <= dg);
      CHECK(dg <= d * dm);
    }
  }
}

TEST_CASE("boundary examples") {
  SUBCASE("1d, L=3") {
    LatticeBall b = LatticeBall::make(site1(0), 3);
    BoundarySet bs = boundary(b);
    REQUIRE(bs.inner.size() == 2);
    CHECK(bs.inner[0][0] == -3);
    CHECK(bs.inner[1][0] == 3);
    CHECK(bs.bonds.size() == 2);
  }
  SUBCASE("2d, L=1") {
    LatticeBall b = LatticeBall::make(site2(0, 0), 1);
    BoundarySet bs = boundary(b);
    CHECK(bs.inner.size() == 8);
    CHECK(bs.bonds.size() == 12);
    auto bb = oracles::brute_boundary(site2(0, 0), 1);
    CHECK(bs.inner.size() == bb.inner.size());
    CHECK(bs.outer.size() == bb.outer.size());
    CHECK(static_cast<long>(bs.bonds.size()) == bb.bonds);
  }
  SUBCASE("ball equal to its ambient") {
    LatticeBall b = LatticeBall::make(site1(0), 3, BallSpec{site1(0), 3});
    BoundarySet bs = boundary(b);
    CHECK(bs.outer.empty());
    CHECK(bs.bonds.empty());
  }
}

TEST_CASE("bond count formula for interior balls") {
  for (int d = 1; d <= 3; ++d) {
    for (int L = 0; L <= (d == 3 ? 6 : 10); ++L) {
      Site c = Site::Zero(d);
      LatticeBall b = LatticeBall::make(c, L, BallSpec{c, L + 2});
      long expect = 2 * d;
      for (int j = 0; j < d - 1; ++j) expect *= 2 * L + 1;
      CHECK(boundary_bond_count(b) == expect);
      auto bb = oracles::brute_boundary(c, L);
      CHECK(boundary_bond_count(b) == bb.bonds);
    }
  }
}

TEST_CASE("bond pairs are adjacent inner-outer pairs") {
  LatticeBall b = LatticeBall::make(site2(1, -1), 2);
  BoundarySet bs = boundary(b);
  auto in_set = [&](const std::vector<Site>& v, const Site& s) {
    for (const Site& t : v)
      if ((t.array() == s.array()).all()) return true;
    return false;
  };
  for (const auto& [x, y] : bs.bonds) {
    CHECK(dist_graph(x, y) == 1);
    CHECK(in_set(bs.inner, x));
    CHECK(in_set(bs.outer, y));
  }
  CHECK(static_cast<long>(bs.bonds.size()) == boundary_bond_count(b));
}

TEST_CASE("site index bijection") {
  for (int d = 1; d <= 3; ++d) {
    Site c = Site::Zero(d);
    c[0] = 4;
    LatticeBall b = LatticeBall::make(c, 3);
    for (int i = 0; i < b.size(); ++i) CHECK(b.index_of(b.site(i)) == i);
    Site outside = c;
    outside[0] += 9;
    CHECK(b.index_of(outside) == -1);
  }
}

TEST_CASE("clipped balls") {
  SUBCASE("clipping removes sites") {
    LatticeBall b = LatticeBall::make(site1(2), 3, BallSpec{site1(0), 3});
    CHECK(b.size() == 5);  // {-1..3} instead of {-1..5}
    CHECK(b.clipped());
    auto bb = oracles::brute_boundary(site1(2), 3, nullptr, -1);
    (void)bb;
  }
  SUBCASE("clipped boundary matches brute force") {
    std::vector<int> amb{0, 0};
    LatticeBall b = LatticeBall::make(site2(2, 1), 2, BallSpec{site2(0, 0), 3});
    BoundarySet bs = boundary(b);
    auto bb = oracles::brute_boundary(site2(2, 1), 2, &amb, 3);
    CHECK(bs.inner.size() == bb.inner.size());
    CHECK(bs.outer.size() == bb.outer.size());
    CHECK(static_cast<long>(bs.bonds.size()) == bb.bonds);
  }
  SUBCASE("center outside ambient is invalid geometry") {
    CHECK_THROWS_AS(LatticeBall::make(site1(5), 1, BallSpec{site1(0), 3}), InvalidGeometry);
  }
  SUBCASE("center inside ambient is never empty") {
    LatticeBall b = LatticeBall::make(site1(3), 2, BallSpec{site1(0), 3});
    CHECK(b.size() > 0);
  }
}

TEST_CASE("ball_sites lexicographic order") {
  auto sites = ball_sites(site2(0, 0), 1, 2);
  REQUIRE(sites.size() == 9);
  CHECK(sites.front()[0] == -1);
  CHECK(sites.front()[1] == -1);
  CHECK(sites.back()[0] == 1);
  CHECK(sites.back()[1] == 1);
  for (size_t i = 1; i < sites.size(); ++i) {
    bool less = sites[i - 1][0] < sites[i][0] ||
                (sites[i - 1][0] == sites[i][0] && sites[i - 1][1] < sites[i][1]);
    CHECK(less);
  }
}
