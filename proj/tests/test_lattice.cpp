#include <doctest.h>

#include <set>

#include "bhvmc/errors.hpp"
#include "bhvmc/lattice.hpp"

using namespace bhvmc;

TEST_CASE("square lattice basic tables") {
  const auto g = LatticeGeometry::square(4);
  CHECK(g.n_sites() == 16);
  CHECK(g.coordination() == 4);
  CHECK(g.max_distance() == 4);  // 2 * floor(L/2)

  SUBCASE("every site has exactly four neighbor slots") {
    for (int i = 0; i < g.n_sites(); ++i) CHECK(g.neighbors(i).size() == 4);
  }

  SUBCASE("minimum-image distances") {
    const int a = g.site_at({0, 0});
    CHECK(g.distance(a, g.site_at({3, 0})) == 1);  // wraps to -1
    CHECK(g.distance(a, g.site_at({2, 2})) == 4);
    for (int i = 0; i < g.n_sites(); ++i) CHECK(g.distance(i, i) == 0);
  }

  SUBCASE("exactly four sites at distance one") {
    for (int i = 0; i < g.n_sites(); ++i) {
      int count = 0;
      for (int j = 0; j < g.n_sites(); ++j)
        if (g.distance(i, j) == 1) ++count;
      CHECK(count == 4);
    }
  }
}

TEST_CASE("distance classes") {
  const auto g3 = LatticeGeometry::square(3);
  CHECK(g3.distance_classes() == std::vector<int>{0, 1, 2});
  const auto g2 = LatticeGeometry::square(2);
  CHECK(g2.max_distance() == 2);
}

TEST_CASE("L=2 keeps duplicate neighbor entries") {
  const auto g = LatticeGeometry::square(2);
  for (int i = 0; i < g.n_sites(); ++i) {
    const auto nn = g.neighbors(i);
    CHECK(nn.size() == 4);
    std::set<int> distinct(nn.begin(), nn.end());
    CHECK(distinct.size() == 2);  // each neighbor appears twice
  }
  // bond list counts each undirected pair twice
  CHECK(g.bonds().size() == 8);
}

TEST_CASE("translations") {
  const auto g = LatticeGeometry::square(4);
  CHECK(g.translate(g.site_at({3, 3}), {1, 0}) == g.site_at({0, 3}));
  for (int i = 0; i < g.n_sites(); ++i) {
    CHECK(g.translate(i, {0, 0}) == i);
    int s = i;
    for (int k = 0; k < 4; ++k) s = g.translate(s, {1, 1});
    CHECK(s == i);
    CHECK(g.translate(g.translate(i, {1, 2}), {-1, -2}) == i);
  }

  SUBCASE("translation is a bijection") {
    std::set<int> image;
    for (int i = 0; i < g.n_sites(); ++i) image.insert(g.translate(i, {2, 3}));
    CHECK(image.size() == static_cast<std::size_t>(g.n_sites()));
  }

  SUBCASE("distance table is translation invariant and symmetric") {
    for (int i = 0; i < g.n_sites(); ++i) {
      for (int j = 0; j < g.n_sites(); ++j) {
        CHECK(g.distance(i, j) == g.distance(j, i));
        CHECK(g.distance(i, j) ==
              g.distance(g.translate(i, {1, 3}), g.translate(j, {1, 3})));
      }
    }
  }
}

TEST_CASE("periodic chains") {
  const auto g = LatticeGeometry::chain(4);
  CHECK(g.n_sites() == 4);
  CHECK(g.coordination() == 2);
  CHECK(g.bonds().size() == 4);
  CHECK(g.max_distance() == 2);
  CHECK(g.distance(0, 3) == 1);

  const auto g2 = LatticeGeometry::chain(2);
  CHECK(g2.bonds().size() == 2);  // the single bond, counted twice
}

TEST_CASE("size and index validation") {
  CHECK_THROWS_AS(LatticeGeometry::square(1), DimensionError);
  CHECK_THROWS_AS(LatticeGeometry::chain(0), DimensionError);
  const auto g = LatticeGeometry::square(3);
  CHECK_THROWS_AS(g.neighbors(9), DimensionError);
  CHECK_THROWS_AS(g.translate(-1, {0, 0}), DimensionError);
  CHECK_THROWS_AS(g.distance(0, 9), DimensionError);
}
