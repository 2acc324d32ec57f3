#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "hlab/grid.hpp"

namespace hlab {

// Lattice j shifts the base lattice by a third of the side at every level. Geometry is
// exact in "units" of one third of a cell: a level-k cube has side 3 * 2^(L-k) units.
struct Lattice {
  int id = 0;
  int dim = 1;
  std::array<int, 2> shift{0, 0};  // per-axis class in {0,1,2} at level 0
};

struct Cube {
  int lattice = 0;
  int level = 0;
  std::array<int64_t, 2> coord{0, 0};
  auto operator<=>(const Cube&) const = default;
};

// Half-open box [lo, hi) per axis, in units or cells depending on context.
struct Box {
  std::array<int64_t, 2> lo{0, 0};
  std::array<int64_t, 2> hi{1, 1};
  bool contains(const Box& o, int dim) const;
  bool intersects(const Box& o, int dim) const;
  int64_t volume(int dim) const;
  auto operator<=>(const Box&) const = default;
};

struct BoundaryError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::vector<Lattice> build_lattices(const Grid& g);
int lattice_count(const Grid& g);

int64_t cube_side_units(const Grid& g, int level);
int64_t lattice_offset_units(const Grid& g, int lattice, int level, int axis);
Box cube_units(const Grid& g, const Cube& q);
bool cube_in_root(const Grid& g, const Cube& q);
// Cubes of one lattice and level inside the root: coord ranges [0, count) per axis.
std::array<int64_t, 2> cube_counts(const Grid& g, int lattice, int level);
Cube parent(const Grid& g, const Cube& q);
std::vector<Cube> children(const Grid& g, const Cube& q);
// Lattice cube of the given level containing a unit point (no root check).
Cube cube_containing_unit(const Grid& g, int lattice, int level, std::array<int64_t, 2> unit);
bool cube_contains_cell(const Grid& g, const Cube& q, int64_t cell);
double cube_volume(const Grid& g, const Cube& q);  // real measure
int64_t cube_cell_side(const Grid& g, int level);  // 2^(L-k)

// Base lattice helpers (cell coordinates).
Cube base_cube(const Grid& g, int level, std::array<int64_t, 2> coord);
Box cube_cells(const Grid& g, const Cube& q);  // requires lattice 0
// Concentric dilate of a base cube, in cells, unclipped.
Box dilate_cells(const Grid& g, const Cube& q, int64_t factor);
Box clip_cells(const Grid& g, const Box& b);
bool box_in_root(const Grid& g, const Box& b);
std::vector<int64_t> box_cell_list(const Grid& g, const Box& b);

// Visits (cell, fraction of the cell covered by q) for every cell meeting q.
template <class F>
void for_each_cell(const Grid& g, const Cube& q, F&& fn) {
  Box u = cube_units(g, q);
  int64_t c_lo[2] = {0, 0}, c_hi[2] = {0, 0};
  for (int a = 0; a < g.dim; ++a) {
    c_lo[a] = u.lo[a] / 3;
    c_hi[a] = (u.hi[a] + 2) / 3;
  }
  auto frac = [&](int a, int64_t c) {
    int64_t lo = std::max(u.lo[a], 3 * c), hi = std::min(u.hi[a], 3 * c + 3);
    return static_cast<double>(hi - lo) / 3.0;
  };
  if (g.dim == 1) {
    for (int64_t c = c_lo[0]; c < c_hi[0]; ++c) fn(c, frac(0, c));
  } else {
    int64_t n = g.per_side();
    for (int64_t i = c_lo[0]; i < c_hi[0]; ++i) {
      double fi = frac(0, i);
      for (int64_t j = c_lo[1]; j < c_hi[1]; ++j) fn(i * n + j, fi * frac(1, j));
    }
  }
}

struct CubeScope {
  bool all_lattices = true;
  int min_level = 0;
  int max_level = -1;  // -1 = grid level
};

// Every cube of the scope inside the root, ordered by lattice, level, coordinates.
std::vector<Cube> scope_cubes(const Grid& g, const CubeScope& s = {});

// 3Q' for a cube Q' of the one-third refined lattice (side 2^(L-k) units at level k):
// the unique lattice cube equal to it.
Cube triple_of_refined(const Grid& g, int level, std::array<int64_t, 2> refined_coord);
// Lattices in which the unit box is a cube (used to test uniqueness).
std::vector<Cube> lattice_cubes_equal_to(const Grid& g, const Box& units);

Cube enclosing_cube(const Grid& g, const Cube& q);

std::vector<Cube> cz_decompose(const GridFunction& gfun, const Cube& q0, double lambda);

struct SparseFamily {
  std::vector<Cube> cubes;
  double eta = 0.5;
  std::optional<std::vector<std::vector<int64_t>>> certificate;  // aligned with cubes
};

struct SparseCheck {
  bool ok = false;
  std::string diagnostic;
  std::optional<size_t> first_violation;
  // Sets built by the laminar greedy rule when no certificate was given.
  std::vector<std::vector<int64_t>> constructed;
};

SparseCheck check_sparse(const Grid& g, const SparseFamily& family);

std::string cube_literal(const Grid& g, const Cube& q);
Cube parse_cube_literal(const Grid& g, const std::string& text);

}  // namespace hlab
