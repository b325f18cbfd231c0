#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <map>

#include "mosaic/topology.hpp"
#include "oracles.hpp"

using namespace mosaic;

TEST_CASE("config validation") {
  GridConfig c;
  CHECK_NOTHROW(c.validate());
  c.nt_rows = 0;
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = GridConfig{2, 2, 0, 4, 4};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
  c = GridConfig{2, 2, 4, 16, -1};
  CHECK_THROWS_AS(c.validate(), std::invalid_argument);
}

TEST_CASE("tile kind follows coordinate parity") {
  TileLattice lat(GridConfig{3, 3, 2, 8, 8});
  for (int y = 0; y < lat.height(); ++y)
    for (int x = 0; x < lat.width(); ++x) {
      const TileKind k = TileLattice::kind_of(x, y);
      if (x % 2 == 0 && y % 2 == 0) CHECK(k == TileKind::NT);
      else if (x % 2 == 1 && y % 2 == 1) CHECK(k == TileKind::RT1);
      else CHECK(k == TileKind::RT0);
      CHECK(lat.tile_at(x, y).kind == k);
    }
}

TEST_CASE("tile census") {
  // counts enumerated by hand from the checkerboard layout
  struct Row { int w, h, nt, rt0, rt1; };
  const Row rows[] = {
      {1, 1, 1, 0, 0},
      {2, 1, 2, 1, 0},
      {2, 2, 4, 4, 1},
      {3, 3, 9, 12, 4},
      {4, 4, 16, 24, 9},
      {4, 2, 8, 10, 3},
  };
  for (const Row& r : rows) {
    CAPTURE(r.w);
    CAPTURE(r.h);
    TileLattice lat(GridConfig{r.h, r.w, 1, 4, 4});
    CHECK(lat.count(TileKind::NT) == r.nt);
    CHECK(lat.count(TileKind::RT0) == r.rt0);
    CHECK(lat.count(TileKind::RT1) == r.rt1);
    CHECK(static_cast<int>(lat.tiles().size()) ==
          (2 * r.w - 1) * (2 * r.h - 1));
  }
}

TEST_CASE("nt indexing round-trips") {
  TileLattice lat(GridConfig{3, 4, 1, 4, 4});
  for (int nt = 0; nt < lat.config().nt_count(); ++nt) {
    const auto [row, col] = lat.nt_coords(nt);
    CHECK(lat.nt_index(row, col) == nt);
    const TileId t = lat.nt_tile(nt);
    CHECK(t.x == 2 * col);
    CHECK(t.y == 2 * row);
    CHECK(t.kind == TileKind::NT);
  }
}

TEST_CASE("hop distance basics") {
  TileLattice lat(GridConfig{4, 4, 1, 4, 4});
  const int a = lat.nt_index(1, 1);
  CHECK(lat.hop_distance(a, a) == 0);
  CHECK(lat.hop_distance(a, lat.nt_index(1, 2)) == 1);  // adjacent
  CHECK(lat.hop_distance(a, lat.nt_index(2, 2)) == 3);  // diagonal
  CHECK(lat.hop_distance(a, lat.nt_index(1, 3)) == 2);  // two tiles east
  // closed form for the general case: 2dx + 2dy - 1
  CHECK(lat.hop_distance(lat.nt_index(0, 0), lat.nt_index(3, 3)) == 11);
  CHECK(lat.max_hop_distance() == 11);
}

TEST_CASE("hop distance symmetric and zero iff equal") {
  TileLattice lat(GridConfig{3, 4, 2, 8, 8});
  const int n = lat.config().nt_count();
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) {
      CHECK(lat.hop_distance(i, j) == lat.hop_distance(j, i));
      CHECK((lat.hop_distance(i, j) == 0) == (i == j));
    }
}

TEST_CASE("hop distance equals BFS over legal 1-turn paths") {
  // the independent oracle searches all <=1-turn RT walks
  for (int h = 1; h <= 4; ++h)
    for (int w = 1; w <= 4; ++w) {
      TileLattice lat(GridConfig{h, w, 1, 4, 4});
      const int n = lat.config().nt_count();
      for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
          CAPTURE(w);
          CAPTURE(h);
          CAPTURE(i);
          CAPTURE(j);
          const int oracle = i == j ? 0 : mosaic::test::bfs_legal_hops(lat, i, j);
          CHECK(oracle == lat.hop_distance(i, j));
        }
    }
}

TEST_CASE("max hop distance special cases") {
  CHECK(TileLattice(GridConfig{1, 1, 1, 1, 1}).max_hop_distance() == 0);
  CHECK(TileLattice(GridConfig{1, 5, 1, 4, 4}).max_hop_distance() == 4);
  CHECK(TileLattice(GridConfig{5, 1, 1, 4, 4}).max_hop_distance() == 4);
  CHECK(TileLattice(GridConfig{2, 2, 1, 4, 4}).max_hop_distance() == 3);
}

TEST_CASE("bucket sizes partition all ordered neuron pairs") {
  for (int h = 1; h <= 3; ++h)
    for (int w = 1; w <= 3; ++w)
      for (int npt : {1, 3}) {
        TileLattice lat(GridConfig{h, w, npt, 16, 16});
        std::int64_t total = 0;
        for (int d = 0; d <= lat.max_hop_distance(); ++d)
          total += lat.bucket_size(d);
        const std::int64_t n = lat.config().total_neurons();
        CHECK(total == n * n);
        CHECK(lat.bucket_size(lat.max_hop_distance() + 1) == 0);
        CHECK_THROWS_AS(lat.bucket_size(-1), std::invalid_argument);
      }
}

TEST_CASE("bucket size matches direct pair enumeration") {
  TileLattice lat(GridConfig{3, 3, 2, 16, 16});
  const int nts = lat.config().nt_count();
  const std::int64_t npt2 = 4;
  std::map<int, std::int64_t> counts;
  for (int i = 0; i < nts; ++i)
    for (int j = 0; j < nts; ++j) counts[lat.hop_distance(i, j)] += npt2;
  for (int d = 0; d <= lat.max_hop_distance(); ++d)
    CHECK(lat.bucket_size(d) == (counts.count(d) ? counts[d] : 0));
}

TEST_CASE("blocked placement and validation") {
  GridConfig cfg{2, 3, 4, 16, 16};
  Placement p = Placement::blocked(cfg);
  CHECK(p.size() == cfg.total_neurons());
  CHECK_NOTHROW(p.validate(cfg));
  for (int n = 0; n < p.size(); ++n) CHECK(p.tile_of(n) == n / 4);
  // uneven placement rejected
  std::vector<int> bad(static_cast<std::size_t>(cfg.total_neurons()), 0);
  CHECK_THROWS(Placement(bad).validate(cfg));
}
