#include <doctest.h>

#include <random>
#include <set>

#include "sdrom/errors.hpp"
#include "sdrom/mesh.hpp"

using namespace sdrom;

TEST_CASE("build_grid spacing and centroids") {
  const auto g = build_grid(300, 300, {-5, 5, -5, 5}, 3);
  CHECK(g.dx == doctest::Approx(1.0 / 30.0));
  CHECK(g.dy == doctest::Approx(1.0 / 30.0));

  const auto one = build_grid(1, 1, {0, 1, 0, 1}, 1);
  CHECK(one.centroid(0, 0)[0] == 0.5);
  CHECK(one.centroid(0, 0)[1] == 0.5);

  const auto small = build_grid(4, 2, {0, 4, 0, 1}, 2);
  CHECK(small.dx == 1.0);
  CHECK(small.dy == 0.5);
  CHECK(small.n_dofs() == 16);

  CHECK_THROWS_AS(build_grid(0, 4, {0, 1, 0, 1}, 1), ConfigError);
  CHECK_THROWS_AS(build_grid(4, 4, {1, 1, 0, 1}, 1), ConfigError);
}

TEST_CASE("decompose layouts") {
  const auto g = build_grid(300, 300, {-5, 5, -5, 5}, 3);
  const auto four = decompose(g, 2, 2, 0);
  REQUIRE(four.size() == 4);
  for (const auto& s : four) {
    CHECK(s.nx() == 150);
    CHECK(s.ny() == 150);
  }
  const auto whole = decompose(g, 1, 1, 0);
  REQUIRE(whole.size() == 1);
  CHECK(whole[0].n_cells() == g.n_cells());
  CHECK_FALSE(whole[0].has_interfaces());

  CHECK_THROWS_WITH_AS(decompose(build_grid(7, 8, {0, 1, 0, 1}, 1), 2, 2, 0), doctest::Contains("along x"),
                       ConfigError);
  CHECK_THROWS_WITH_AS(decompose(build_grid(8, 10, {0, 1, 0, 1}, 1), 2, 3, 0), doctest::Contains("along y"),
                       ConfigError);
  CHECK_THROWS_AS(decompose(g, 2, 2, 3), ConfigError);
}

TEST_CASE("8x8 with overlap 2 brute-force cover") {
  const auto g = build_grid(8, 8, {0, 1, 0, 1}, 1);
  const auto subs = decompose(g, 2, 2, 2);
  for (const auto& s : subs) {
    CHECK(s.nx() == 5);
    CHECK(s.ny() == 5);
  }
  // every cell covered; shared columns between horizontal neighbors = 2
  for (int j = 0; j < 8; ++j) {
    for (int i = 0; i < 8; ++i) {
      int count = 0;
      for (const auto& s : subs) count += s.contains(i, j) ? 1 : 0;
      CHECK(count >= 1);
    }
  }
  std::set<int> cols0, cols1;
  for (int i = 0; i < 8; ++i) {
    if (subs[0].contains(i, 0)) cols0.insert(i);
    if (subs[1].contains(i, 0)) cols1.insert(i);
  }
  std::vector<int> shared;
  for (int c : cols0)
    if (cols1.count(c)) shared.push_back(c);
  CHECK(shared.size() == 2);
}

TEST_CASE("partition property and neighbor consistency") {
  std::mt19937_64 rng(7);
  for (int trial = 0; trial < 30; ++trial) {
    const int px = 1 + static_cast<int>(rng() % 3), py = 1 + static_cast<int>(rng() % 3);
    const int w = 4 + static_cast<int>(rng() % 4);
    const int overlap = 2 * static_cast<int>(rng() % 2);
    const auto g = build_grid(px * w, py * w, {0, 1, 0, 1}, 1);
    const auto subs = decompose(g, px, py, overlap);
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        int count = 0;
        for (const auto& s : subs) count += s.contains(i, j) ? 1 : 0;
        CHECK(count >= 1);
        if (overlap == 0) CHECK(count == 1);
      }
    }
    for (const auto& s : subs) {
      for (Side side : all_sides) {
        const int n = s.neighbor[side_index(side)];
        if (n >= 0) CHECK(subs[static_cast<std::size_t>(n)].neighbor[side_index(opposite(side))] == s.id);
      }
    }
  }
}

TEST_CASE("donor maps match centroids") {
  SUBCASE("non-overlapping 2x2: right ghost column -> neighbor's first column") {
    const auto g = build_grid(8, 8, {0, 1, 0, 1}, 1);
    const auto subs = decompose(g, 2, 2, 0);
    const auto maps = build_donor_maps(subs);
    bool found = false;
    for (const auto& m : maps) {
      if (m.receiver == 0 && m.side == Side::right) {
        found = true;
        CHECK(m.donor == 1);
        for (const auto& [slot, cell] : m.entries) CHECK(cell == subs[1].local_cell(0, slot));
      }
    }
    CHECK(found);
  }
  SUBCASE("1x1 has no maps") {
    const auto g = build_grid(8, 8, {0, 1, 0, 1}, 1);
    CHECK(build_donor_maps(decompose(g, 1, 1, 0)).empty());
  }
  SUBCASE("overlap 2, 2x1: centroid matching and injectivity") {
    const auto g = build_grid(8, 8, {0, 1, 0, 1}, 1);
    const auto subs = decompose(g, 2, 1, 2);
    const auto maps = build_donor_maps(subs);
    REQUIRE(maps.size() == 2);
    for (const auto& m : maps) {
      const auto& rec = subs[static_cast<std::size_t>(m.receiver)];
      const auto& don = subs[static_cast<std::size_t>(m.donor)];
      REQUIRE(static_cast<int>(m.entries.size()) == rec.side_length(m.side));
      std::set<int> seen;
      for (const auto& [slot, cell] : m.entries) {
        const auto [gi, gj] = rec.ghost_global(m.side, slot);
        const auto cg = g.centroid(gi, gj);
        const auto cd = g.centroid(don.i0 + cell % don.nx(), don.j0 + cell / don.nx());
        CHECK(cg[0] == cd[0]);
        CHECK(cg[1] == cd[1]);
        seen.insert(cell);
      }
      CHECK(seen.size() == m.entries.size());
    }
    // left tile is [0,5): its right ghost is global column 5, which is local column 2 of [3,8)
    for (const auto& m : maps) {
      if (m.receiver == 0) {
        for (const auto& [slot, cell] : m.entries) CHECK(cell % subs[1].nx() == 2);
      }
    }
  }
}

TEST_CASE("restrict / gather reassembly is exact") {
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(-1, 1);
  for (int overlap : {0, 2, 4}) {
    const auto g = build_grid(12, 12, {0, 1, 0, 1}, 2);
    const auto subs = decompose(g, 2, 3, overlap);
    std::vector<double> field(static_cast<std::size_t>(g.n_dofs()));
    for (auto& v : field) v = u(rng);
    std::vector<std::vector<double>> locals;
    for (const auto& s : subs) locals.push_back(restrict_field(g, s, field));
    CHECK(gather_field(g, subs, locals) == field);
    const auto own = ownership(g, subs);
    for (int j = 0; j < g.ny; ++j) {
      for (int i = 0; i < g.nx; ++i) {
        int lowest = 1 << 30;
        for (const auto& s : subs)
          if (s.contains(i, j)) lowest = std::min(lowest, s.id);
        CHECK(own[static_cast<std::size_t>(i + j * g.nx)] == lowest);
      }
    }
  }
}
