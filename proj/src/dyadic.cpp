#include "hlab/dyadic.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <regex>

namespace hlab {

namespace {

int64_t floor_div(int64_t a, int64_t b) {
  int64_t q = a / b;
  if ((a % b != 0) && ((a < 0) != (b < 0))) --q;
  return q;
}

int64_t pos_mod(int64_t a, int64_t b) { return ((a % b) + b) % b; }

int shift_class(int lattice, int axis) { return axis == 0 ? lattice % 3 : (lattice / 3) % 3; }

void check_lattice(const Grid& g, int lattice) {
  if (lattice < 0 || lattice >= lattice_count(g)) throw std::invalid_argument("lattice id out of range");
}

// Prefix sums over a box of cells for block averages.
struct CellPrefix {
  const Grid* g;
  std::vector<double> p;
  int64_t n;
  explicit CellPrefix(const GridFunction& f) : g(&f.grid), n(f.grid.per_side()) {
    if (g->dim == 1) {
      p.assign(static_cast<size_t>(n + 1), 0.0);
      for (int64_t i = 0; i < n; ++i) p[i + 1] = p[i] + f.values[i];
    } else {
      p.assign(static_cast<size_t>((n + 1) * (n + 1)), 0.0);
      for (int64_t i = 0; i < n; ++i)
        for (int64_t j = 0; j < n; ++j)
          p[(i + 1) * (n + 1) + j + 1] =
              f.values[i * n + j] + p[i * (n + 1) + j + 1] + p[(i + 1) * (n + 1) + j] - p[i * (n + 1) + j];
    }
  }
  double sum(const Box& b) const {
    if (g->dim == 1) return p[b.hi[0]] - p[b.lo[0]];
    auto at = [&](int64_t i, int64_t j) { return p[i * (n + 1) + j]; };
    return at(b.hi[0], b.hi[1]) - at(b.lo[0], b.hi[1]) - at(b.hi[0], b.lo[1]) + at(b.lo[0], b.lo[1]);
  }
};

}  // namespace

bool Box::contains(const Box& o, int dim) const {
  for (int a = 0; a < dim; ++a)
    if (o.lo[a] < lo[a] || o.hi[a] > hi[a]) return false;
  return true;
}

bool Box::intersects(const Box& o, int dim) const {
  for (int a = 0; a < dim; ++a)
    if (o.hi[a] <= lo[a] || hi[a] <= o.lo[a]) return false;
  return true;
}

int64_t Box::volume(int dim) const {
  int64_t v = 1;
  for (int a = 0; a < dim; ++a) v *= std::max<int64_t>(0, hi[a] - lo[a]);
  return v;
}

int lattice_count(const Grid& g) { return g.dim == 1 ? 3 : 9; }

std::vector<Lattice> build_lattices(const Grid& g) {
  std::vector<Lattice> out;
  for (int j = 0; j < lattice_count(g); ++j) {
    Lattice l;
    l.id = j;
    l.dim = g.dim;
    l.shift = {shift_class(j, 0), g.dim == 2 ? shift_class(j, 1) : 0};
    out.push_back(l);
  }
  return out;
}

int64_t cube_cell_side(const Grid& g, int level) { return int64_t{1} << (g.level - level); }
int64_t cube_side_units(const Grid& g, int level) { return 3 * cube_cell_side(g, level); }

int64_t lattice_offset_units(const Grid& g, int lattice, int level, int axis) {
  int c0 = shift_class(lattice, axis);
  int c = (level % 2 == 0) ? c0 : (2 * c0) % 3;
  return cube_cell_side(g, level) * c;
}

Box cube_units(const Grid& g, const Cube& q) {
  if (q.level < 0 || q.level > g.level) throw std::invalid_argument("cube level out of range");
  Box b;
  int64_t s = cube_side_units(g, q.level);
  for (int a = 0; a < g.dim; ++a) {
    b.lo[a] = s * q.coord[a] + lattice_offset_units(g, q.lattice, q.level, a);
    b.hi[a] = b.lo[a] + s;
  }
  return b;
}

bool cube_in_root(const Grid& g, const Cube& q) {
  Box u = cube_units(g, q);
  int64_t top = 3 * g.per_side();
  for (int a = 0; a < g.dim; ++a)
    if (u.lo[a] < 0 || u.hi[a] > top) return false;
  return true;
}

std::array<int64_t, 2> cube_counts(const Grid& g, int lattice, int level) {
  std::array<int64_t, 2> c{1, 1};
  int64_t s = cube_side_units(g, level), top = 3 * g.per_side();
  for (int a = 0; a < g.dim; ++a) c[a] = (top - lattice_offset_units(g, lattice, level, a)) / s;
  return c;
}

Cube cube_containing_unit(const Grid& g, int lattice, int level, std::array<int64_t, 2> unit) {
  Cube q{lattice, level, {0, 0}};
  int64_t s = cube_side_units(g, level);
  for (int a = 0; a < g.dim; ++a) q.coord[a] = floor_div(unit[a] - lattice_offset_units(g, lattice, level, a), s);
  return q;
}

Cube parent(const Grid& g, const Cube& q) {
  if (q.level == 0) throw std::invalid_argument("root-level cube has no parent");
  Box u = cube_units(g, q);
  return cube_containing_unit(g, q.lattice, q.level - 1, u.lo);
}

std::vector<Cube> children(const Grid& g, const Cube& q) {
  if (q.level >= g.level) return {};
  Box u = cube_units(g, q);
  int64_t half = cube_side_units(g, q.level + 1);
  std::vector<Cube> out;
  int count = g.dim == 1 ? 2 : 4;
  for (int k = 0; k < count; ++k) {
    std::array<int64_t, 2> p{u.lo[0] + (k >> (g.dim - 1) & 1) * half, 0};
    if (g.dim == 2) p[1] = u.lo[1] + (k & 1) * half;
    out.push_back(cube_containing_unit(g, q.lattice, q.level + 1, p));
  }
  return out;
}

bool cube_contains_cell(const Grid& g, const Cube& q, int64_t cell) {
  Box u = cube_units(g, q);
  auto c = g.coords(cell);
  for (int a = 0; a < g.dim; ++a) {
    int64_t m = 3 * c[a] + 1;
    if (m < u.lo[a] || m >= u.hi[a]) return false;
  }
  return true;
}

double cube_volume(const Grid& g, const Cube& q) {
  double s = g.cell_side() * static_cast<double>(cube_cell_side(g, q.level));
  return g.dim == 1 ? s : s * s;
}

Cube base_cube(const Grid& g, int level, std::array<int64_t, 2> coord) {
  Cube q{0, level, coord};
  if (g.dim == 1) q.coord[1] = 0;
  if (!cube_in_root(g, q)) throw std::invalid_argument("base cube outside root");
  return q;
}

Box cube_cells(const Grid& g, const Cube& q) {
  if (q.lattice != 0) throw std::invalid_argument("cell box requested for a shifted cube");
  Box b;
  int64_t s = cube_cell_side(g, q.level);
  for (int a = 0; a < g.dim; ++a) {
    b.lo[a] = s * q.coord[a];
    b.hi[a] = b.lo[a] + s;
  }
  if (g.dim == 1) b.lo[1] = 0, b.hi[1] = 1;
  return b;
}

Box dilate_cells(const Grid& g, const Cube& q, int64_t factor) {
  Box b = cube_cells(g, q);
  int64_t s = cube_cell_side(g, q.level);
  // side*factor centered on the cube; factor is 3 or a power of two
  int64_t extra = s * (factor - 1);
  for (int a = 0; a < g.dim; ++a) {
    b.lo[a] -= extra / 2;
    b.hi[a] += extra - extra / 2;
  }
  return b;
}

Box clip_cells(const Grid& g, const Box& b) {
  Box c = b;
  for (int a = 0; a < g.dim; ++a) {
    c.lo[a] = std::clamp<int64_t>(c.lo[a], 0, g.per_side());
    c.hi[a] = std::clamp<int64_t>(c.hi[a], 0, g.per_side());
  }
  return c;
}

bool box_in_root(const Grid& g, const Box& b) {
  for (int a = 0; a < g.dim; ++a)
    if (b.lo[a] < 0 || b.hi[a] > g.per_side()) return false;
  return true;
}

std::vector<int64_t> box_cell_list(const Grid& g, const Box& b) {
  std::vector<int64_t> out;
  out.reserve(static_cast<size_t>(b.volume(g.dim)));
  if (g.dim == 1) {
    for (int64_t i = b.lo[0]; i < b.hi[0]; ++i) out.push_back(i);
  } else {
    for (int64_t i = b.lo[0]; i < b.hi[0]; ++i)
      for (int64_t j = b.lo[1]; j < b.hi[1]; ++j) out.push_back(g.index({i, j}));
  }
  return out;
}

std::vector<Cube> scope_cubes(const Grid& g, const CubeScope& s) {
  int kmax = s.max_level < 0 ? g.level : std::min(s.max_level, g.level);
  int lcount = s.all_lattices ? lattice_count(g) : 1;
  std::vector<Cube> out;
  for (int j = 0; j < lcount; ++j)
    for (int k = std::max(0, s.min_level); k <= kmax; ++k) {
      auto c = cube_counts(g, j, k);
      for (int64_t a = 0; a < c[0]; ++a)
        for (int64_t b = 0; b < (g.dim == 2 ? c[1] : 1); ++b) out.push_back(Cube{j, k, {a, b}});
    }
  return out;
}

Cube triple_of_refined(const Grid& g, int level, std::array<int64_t, 2> rc) {
  int c0[2] = {0, 0};
  Cube q{0, level, {0, 0}};
  for (int a = 0; a < g.dim; ++a) {
    int c = static_cast<int>(pos_mod(rc[a] - 1, 3));
    c0[a] = (level % 2 == 0) ? c : (2 * c) % 3;
    q.coord[a] = floor_div(rc[a] - 1 - c, 3);
  }
  q.lattice = c0[0] + 3 * c0[1];
  return q;
}

std::vector<Cube> lattice_cubes_equal_to(const Grid& g, const Box& units) {
  std::vector<Cube> out;
  for (int j = 0; j < lattice_count(g); ++j)
    for (int k = 0; k <= g.level; ++k) {
      int64_t s = cube_side_units(g, k);
      bool ok = true;
      Cube q{j, k, {0, 0}};
      for (int a = 0; a < g.dim && ok; ++a) {
        int64_t rel = units.lo[a] - lattice_offset_units(g, j, k, a);
        ok = units.hi[a] - units.lo[a] == s && pos_mod(rel, s) == 0;
        if (ok) q.coord[a] = floor_div(rel, s);
      }
      if (ok) out.push_back(q);
    }
  return out;
}

Cube enclosing_cube(const Grid& g, const Cube& q) {
  Box u = cube_units(g, q);
  int64_t s = cube_side_units(g, q.level);
  Box t = u;
  for (int a = 0; a < g.dim; ++a) {
    t.lo[a] -= s;
    t.hi[a] += s;
  }
  int64_t top = 3 * g.per_side();
  for (int a = 0; a < g.dim; ++a)
    if (t.lo[a] < 0 || t.hi[a] > top) throw BoundaryError("3Q leaves the root domain");
  // side(R) <= 9 side(Q) allows at most three levels up
  for (int k = q.level - 1; k >= std::max(0, q.level - 3); --k)
    for (int j = 0; j < lattice_count(g); ++j) {
      Cube r = cube_containing_unit(g, j, k, t.lo);
      if (!cube_in_root(g, r)) continue;
      if (cube_units(g, r).contains(t, g.dim)) return r;
    }
  throw BoundaryError("no enclosing lattice cube inside the root");
}

std::vector<Cube> cz_decompose(const GridFunction& gfun, const Cube& q0, double lambda) {
  const Grid& g = gfun.grid;
  if (q0.lattice != 0) throw std::invalid_argument("CZ decomposition runs on base lattice cubes");
  if (!(lambda > 0.0)) throw std::invalid_argument("CZ height must be positive");
  CellPrefix pre(gfun);
  std::vector<Cube> out;
  std::vector<Cube> stack{q0};
  while (!stack.empty()) {
    Cube q = stack.back();
    stack.pop_back();
    Box b = cube_cells(g, q);
    double avg = pre.sum(b) / static_cast<double>(b.volume(g.dim));
    if (avg > lambda) {
      out.push_back(q);
      continue;
    }
    auto ch = children(g, q);
    for (auto it = ch.rbegin(); it != ch.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

namespace {

// Cells whose closure lies inside the cube.
std::vector<int64_t> full_cells(const Grid& g, const Cube& q) {
  std::vector<int64_t> out;
  for_each_cell(g, q, [&](int64_t c, double frac) {
    if (frac == 1.0) out.push_back(c);
  });
  return out;
}

}  // namespace

SparseCheck check_sparse(const Grid& g, const SparseFamily& fam) {
  SparseCheck res;
  const size_t n = fam.cubes.size();
  const double cell_vol = g.cell_volume();
  auto need = [&](const Cube& q) {
    double cells = cube_volume(g, q) / cell_vol;
    return static_cast<int64_t>(std::ceil(fam.eta * cells - 1e-9));
  };
  std::vector<int64_t> owner(static_cast<size_t>(g.cell_count()), -1);

  if (fam.certificate) {
    const auto& cert = *fam.certificate;
    if (cert.size() != n) {
      res.diagnostic = "certificate size does not match family";
      return res;
    }
    for (size_t i = 0; i < n; ++i) {
      Box u = cube_units(g, fam.cubes[i]);
      for (int64_t c : cert[i]) {
        if (c < 0 || c >= g.cell_count()) {
          res.diagnostic = "certificate cell out of range";
          res.first_violation = i;
          return res;
        }
        auto cc = g.coords(c);
        Box cu{{3 * cc[0], 3 * cc[1]}, {3 * cc[0] + 3, 3 * cc[1] + 3}};
        if (!u.contains(cu, g.dim)) {
          res.diagnostic = "E_Q not contained in Q for cube " + cube_literal(g, fam.cubes[i]);
          res.first_violation = i;
          return res;
        }
        if (owner[c] >= 0) {
          res.diagnostic = "E_Q sets overlap at cell " + std::to_string(c);
          res.first_violation = i;
          return res;
        }
        owner[c] = static_cast<int64_t>(i);
      }
      if (static_cast<int64_t>(cert[i].size()) < need(fam.cubes[i])) {
        res.diagnostic = "|E_Q| < eta |Q| for cube " + cube_literal(g, fam.cubes[i]);
        res.first_violation = i;
        return res;
      }
    }
    res.ok = true;
    return res;
  }

  // Cubes of a single lattice are automatically laminar.
  bool single = std::all_of(fam.cubes.begin(), fam.cubes.end(),
                            [&](const Cube& q) { return n == 0 || q.lattice == fam.cubes[0].lattice; });
  if (!single) {
    if (n > 4000) {
      res.diagnostic = "certificate required";
      return res;
    }
    std::vector<Box> boxes;
    for (const auto& q : fam.cubes) boxes.push_back(cube_units(g, q));
    for (size_t i = 0; i < n; ++i)
      for (size_t j = i + 1; j < n; ++j)
        if (boxes[i].intersects(boxes[j], g.dim) && !boxes[i].contains(boxes[j], g.dim) &&
            !boxes[j].contains(boxes[i], g.dim)) {
          res.diagnostic = "certificate required";
          return res;
        }
  }

  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  std::stable_sort(order.begin(), order.end(),
                   [&](size_t a, size_t b) { return fam.cubes[a].level > fam.cubes[b].level; });
  res.constructed.assign(n, {});
  for (size_t i : order) {
    const Cube& q = fam.cubes[i];
    int64_t want = need(q);
    auto& e = res.constructed[i];
    for (int64_t c : full_cells(g, q)) {
      if (static_cast<int64_t>(e.size()) >= want) break;
      if (owner[c] < 0) {
        owner[c] = static_cast<int64_t>(i);
        e.push_back(c);
      }
    }
    if (static_cast<int64_t>(e.size()) < want) {
      res.diagnostic = "greedy certificate short of eta|Q| at cube " + cube_literal(g, q);
      res.first_violation = i;
      return res;
    }
  }
  res.ok = true;
  return res;
}

std::string cube_literal(const Grid& g, const Cube& q) {
  std::string s = "[" + std::to_string(q.lattice) + ":" + std::to_string(q.level) + ":(" + std::to_string(q.coord[0]);
  if (g.dim == 2) s += "," + std::to_string(q.coord[1]);
  return s + ")]";
}

Cube parse_cube_literal(const Grid& g, const std::string& text) {
  static const std::regex re(R"(\s*\[\s*(\d+)\s*:\s*(\d+)\s*:\s*\(\s*(-?\d+)\s*(?:,\s*(-?\d+)\s*)?\)\s*\]\s*)");
  std::smatch m;
  if (!std::regex_match(text, m, re)) throw std::invalid_argument("bad cube literal: " + text);
  Cube q;
  q.lattice = std::stoi(m[1]);
  q.level = std::stoi(m[2]);
  q.coord[0] = std::stoll(m[3]);
  bool has2 = m[4].matched;
  if (has2 != (g.dim == 2)) throw std::invalid_argument("cube literal dimension mismatch: " + text);
  if (has2) q.coord[1] = std::stoll(m[4]);
  check_lattice(g, q.lattice);
  if (q.level > g.level) throw std::invalid_argument("cube literal level exceeds grid level");
  return q;
}

}  // namespace hlab
