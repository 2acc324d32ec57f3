#pragma once

#include <algorithm>
#include <random>
#include <vector>

#include "hlab/dyadic.hpp"

namespace hlab {
namespace oracle {

// Maximal base-lattice subcubes of q0 with average above lambda, by scanning every level.
inline std::vector<Cube> cz_oracle(const GridFunction& f, const Cube& q0, double lambda) {
  const Grid& g = f.grid;
  auto avg = [&](const Cube& q) {
    double s = 0;
    auto cells = box_cell_list(g, cube_cells(g, q));
    for (auto c : cells) s += f[c];
    return s / static_cast<double>(cells.size());
  };
  std::vector<Cube> out;
  Box r = cube_cells(g, q0);
  for (int k = q0.level; k <= g.level; ++k) {
    int64_t side = int64_t{1} << (g.level - k);
    int64_t lo0 = r.lo[0] / side, hi0 = r.hi[0] / side;
    int64_t lo1 = g.dim == 2 ? r.lo[1] / side : 0, hi1 = g.dim == 2 ? r.hi[1] / side : 1;
    for (int64_t i = lo0; i < hi0; ++i)
      for (int64_t j = lo1; j < hi1; ++j) {
        Cube q = base_cube(g, k, {i, j});
        if (!(avg(q) > lambda)) continue;
        bool maximal = true;
        for (int a = k - 1; a >= q0.level && maximal; --a) {
          int sh = k - a;
          Cube anc = base_cube(g, a, {i >> sh, g.dim == 2 ? (j >> sh) : 0});
          if (avg(anc) > lambda) maximal = false;
        }
        if (maximal) out.push_back(q);
      }
  }
  std::sort(out.begin(), out.end());
  return out;
}

inline GridFunction random_indicators(const Grid& g, std::mt19937_64& rng) {
  GridFunction f(g, 0.0);
  int terms = 1 + static_cast<int>(rng() % 4);
  int64_t n = g.per_side();
  for (int t = 0; t < terms; ++t) {
    int64_t a = static_cast<int64_t>(rng() % n), b = static_cast<int64_t>(rng() % n);
    if (a > b) std::swap(a, b);
    int64_t c = static_cast<int64_t>(rng() % n), d = static_cast<int64_t>(rng() % n);
    if (c > d) std::swap(c, d);
    double h = 0.5 + static_cast<double>(rng() % 4);
    for (int64_t i = a; i <= b; ++i) {
      if (g.dim == 1) {
        f[i] += h;
        continue;
      }
      for (int64_t j = c; j <= d; ++j) f[g.index({i, j})] += h;
    }
  }
  return f;
}

}  // namespace oracle

}  // namespace hlab
