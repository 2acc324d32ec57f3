#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "hlab/dyadic.hpp"
#include "oracles.hpp"

using namespace hlab;

TEST_CASE("lattice counts") {
  CHECK(lattice_count(Grid(1, {0, 0}, 1.0, 6)) == 3);
  CHECK(lattice_count(Grid(2, {0, 0}, 1.0, 4)) == 9);
}

TEST_CASE("3Q' is a cube of exactly one lattice") {
  // Q' runs over the one-third refined lattice: side s = 2^(L-k) units, corners on multiples of s
  std::mt19937_64 rng(11);
  for (int dim : {1, 2}) {
    Grid g(dim, {0, 0}, 1.0, dim == 1 ? 8 : 5);
    for (int i = 0; i < 100; ++i) {
      int k = static_cast<int>(rng() % static_cast<uint64_t>(g.level + 1));
      int64_t s = cube_cell_side(g, k);
      std::array<int64_t, 2> rc{0, 0};
      Box three;
      for (int a = 0; a < dim; ++a) {
        rc[a] = static_cast<int64_t>(rng() % (3 * (uint64_t{1} << k)));
        three.lo[a] = (rc[a] - 1) * s;
        three.hi[a] = (rc[a] + 2) * s;
      }
      auto hits = lattice_cubes_equal_to(g, three);
      REQUIRE(hits.size() == 1);
      CHECK(hits[0] == triple_of_refined(g, k, rc));
    }
  }
}

TEST_CASE("enclosing cube") {
  Grid g(1, {0, 0}, 1.0, 8);
  Cube mid = base_cube(g, 3, {4, 0});
  Cube r = enclosing_cube(g, mid);
  CHECK(cube_volume(g, r) / cube_volume(g, mid) <= 9.0);
  CHECK(cube_units(g, r).contains(cube_units(g, mid), 1));
  CHECK_THROWS_AS(enclosing_cube(g, base_cube(g, 0, {0, 0})), BoundaryError);

  Grid g2(2, {0, 0}, 1.0, 5);
  Cube q2 = base_cube(g2, 3, {3, 4});
  Cube r2 = enclosing_cube(g2, q2);
  Box d = dilate_cells(g2, q2, 3);
  for (int64_t c : box_cell_list(g2, d)) CHECK(cube_contains_cell(g2, r2, c));
}


TEST_CASE("CZ decomposition examples") {
  Grid g(1, {0, 0}, 1.0, 6);
  GridFunction f(g, 0.0);
  for (int i = 0; i < 16; ++i) f[i] = 1.0;
  auto q0 = base_cube(g, 0, {0, 0});
  auto out = cz_decompose(f, q0, 0.5);
  REQUIRE(out.size() == 1);
  CHECK(out[0] == base_cube(g, 2, {0, 0}));
  CHECK(cz_decompose(GridFunction(g, 0.0), q0, 0.5).empty());
}

TEST_CASE("CZ decomposition equals the tree scan") {
  std::mt19937_64 rng(2024);
  for (int it = 0; it < 100; ++it) {
    int dim = it % 2 ? 2 : 1;
    Grid g(dim, {0, 0}, 1.0, dim == 1 ? 7 : 4);
    GridFunction f = oracle::random_indicators(g, rng);
    Cube q0 = base_cube(g, it % 3 == 0 ? 1 : 0, {0, 0});
    double lam = 0.25 + static_cast<double>(rng() % 8) * 0.5;
    auto got = cz_decompose(f, q0, lam);
    std::sort(got.begin(), got.end());
    CHECK(got == oracle::cz_oracle(f, q0, lam));
    for (const auto& p : got) {
      if (p.level == g.level || p == q0) continue;
      auto cells = box_cell_list(g, cube_cells(g, p));
      double s = 0;
      for (auto c : cells) s += f[c];
      double a = s / static_cast<double>(cells.size());
      CHECK(a > lam);
      CHECK(a <= std::ldexp(lam, dim) * (1 + 1e-12));
    }
  }
}

TEST_CASE("sparse check measure accounting") {
  Grid g(1, {0, 0}, 1.0, 4);
  SparseFamily disjoint{{base_cube(g, 1, {0, 0}), base_cube(g, 1, {1, 0})}, 1.0, std::nullopt};
  CHECK(check_sparse(g, disjoint).ok);
  SparseFamily depth1{{base_cube(g, 0, {0, 0}), base_cube(g, 1, {0, 0}), base_cube(g, 1, {1, 0})}, 0.5, std::nullopt};
  CHECK(check_sparse(g, depth1).ok);
  SparseFamily depth2 = depth1;
  for (int i = 0; i < 4; ++i) depth2.cubes.push_back(base_cube(g, 2, {i, 0}));
  CHECK_FALSE(check_sparse(g, depth2).ok);
}

TEST_CASE("cube literals round trip") {
  Grid g(2, {0, 0}, 1.0, 5);
  for (const auto& q : scope_cubes(g, {true, 2, 3})) CHECK(parse_cube_literal(g, cube_literal(g, q)) == q);
}
