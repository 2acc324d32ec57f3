#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "hlab/operators.hpp"
#include "hlab/orlicz.hpp"

namespace hlab {

namespace {

double cube_stat(const GridFunction& f, const Cube& q, const MaximalVariant& v) {
  const Grid& g = f.grid;
  switch (v.kind) {
    case MaximalKind::M: {
      double s = 0.0, m = 0.0;
      for_each_cell(g, q, [&](int64_t c, double fr) {
        s += std::abs(f.values[c]) * fr;
        m += fr;
      });
      return s / m;
    }
    case MaximalKind::Mdelta: {
      double s = 0.0, m = 0.0;
      for_each_cell(g, q, [&](int64_t c, double fr) {
        s += std::pow(std::abs(f.values[c]), v.delta) * fr;
        m += fr;
      });
      return std::pow(s / m, 1.0 / v.delta);
    }
    case MaximalKind::MA:
      return luxemburg_norm(f, q, *v.A);
    case MaximalKind::MAW:
      return luxemburg_norm(f, q, *v.A, v.w);
  }
  return 0.0;
}

GridFunction maximal_impl(const GridFunction& f, const MaximalVariant& v, const CubeScope& scope, bool parallel) {
  const Grid& g = f.grid;
  if ((v.kind == MaximalKind::MA || v.kind == MaximalKind::MAW) && !v.A)
    throw std::invalid_argument("Orlicz maximal operator needs a Young function");
  if (v.kind == MaximalKind::MAW && (!v.w || !(v.w->grid == g))) throw std::invalid_argument("MAW needs a weight");
  if (v.kind == MaximalKind::Mdelta && !(v.delta > 0.0)) throw std::invalid_argument("Mdelta needs delta > 0");
  const int kmax = scope.max_level < 0 ? g.level : std::min(scope.max_level, g.level);
  const int kmin = std::max(0, scope.min_level);
  const int lcount = scope.all_lattices ? lattice_count(g) : 1;

  struct Layer {
    int lattice, level;
    std::array<int64_t, 2> counts;
    std::vector<double> stat;
  };
  std::vector<Layer> layers;
  for (int j = 0; j < lcount; ++j)
    for (int k = kmin; k <= kmax; ++k) {
      auto c = cube_counts(g, j, k);
      if (g.dim == 1) c[1] = 1;
      if (c[0] <= 0 || c[1] <= 0) continue;
      layers.push_back({j, k, c, std::vector<double>(static_cast<size_t>(c[0] * c[1]))});
    }
  for (auto& L : layers) {
    const int64_t total = L.counts[0] * L.counts[1];
#pragma omp parallel for schedule(dynamic, 8) if (parallel)
    for (int64_t t = 0; t < total; ++t) {
      Cube q{L.lattice, L.level, {t / L.counts[1], t % L.counts[1]}};
      L.stat[t] = cube_stat(f, q, v);
    }
  }
  GridFunction out(g);
  const int64_t cells = g.cell_count();
#pragma omp parallel for schedule(static) if (parallel)
  for (int64_t c = 0; c < cells; ++c) {
    auto cc = g.coords(c);
    std::array<int64_t, 2> unit{3 * cc[0] + 1, 3 * cc[1] + 1};
    double best = 0.0;
    for (const auto& L : layers) {
      Cube q = cube_containing_unit(g, L.lattice, L.level, unit);
      if (q.coord[0] < 0 || q.coord[0] >= L.counts[0]) continue;
      if (g.dim == 2 && (q.coord[1] < 0 || q.coord[1] >= L.counts[1])) continue;
      best = std::max(best, L.stat[q.coord[0] * L.counts[1] + (g.dim == 2 ? q.coord[1] : 0)]);
    }
    out.values[c] = best;
  }
  return out;
}

}  // namespace

GridFunction maximal(const GridFunction& f, const MaximalVariant& v, const CubeScope& scope) {
  return maximal_impl(f, v, scope, true);
}

GridFunction maximal_serial(const GridFunction& f, const MaximalVariant& v, const CubeScope& scope) {
  return maximal_impl(f, v, scope, false);
}

GridFunction grand_maximal_truncated(const DiscreteOperator& op, const GridFunction& gfun, const Cube& q0) {
  const Grid& g = op.grid();
  if (!(gfun.grid == g)) throw std::invalid_argument("function and operator grids differ");
  const Box q = cube_cells(g, q0);
  const Box R = clip_cells(g, dilate_cells(g, q0, 3));
  const int L = g.level, k0 = q0.level, levels = L - k0 + 1;
  const int64_t n = g.per_side();
  const int64_t qn0 = q.hi[0] - q.lo[0], qn1 = g.dim == 2 ? q.hi[1] - q.lo[1] : 1;
  const int64_t qcount = qn0 * qn1;
  std::vector<double> vals(static_cast<size_t>(qcount * levels));

  if (g.dim == 1) {
    const int64_t rn = R.hi[0] - R.lo[0];
#pragma omp parallel
    {
      std::vector<double> P(static_cast<size_t>(rn + 1));
#pragma omp for schedule(dynamic, 4)
      for (int64_t t = 0; t < qcount; ++t) {
        const int64_t xi = q.lo[0] + t;
        P[0] = 0.0;
        for (int64_t y = 0; y < rn; ++y) {
          const int64_t src = R.lo[0] + y;
          P[y + 1] = P[y] + op.weight(xi, src) * gfun.values[src];
        }
        for (int lev = 0; lev < levels; ++lev) {
          const int64_t side = cube_cell_side(g, k0 + lev);
          const int64_t m = xi / side;
          const int64_t a = std::max(R.lo[0], (m - 1) * side) - R.lo[0];
          const int64_t b = std::min(R.hi[0], (m + 2) * side) - R.lo[0];
          vals[t * levels + lev] = std::abs(P[a] + (P[rn] - P[b]));
        }
      }
    }
  } else {
    const int64_t rw = R.hi[0] - R.lo[0], rh = R.hi[1] - R.lo[1];
#pragma omp parallel
    {
      std::vector<double> P(static_cast<size_t>((rw + 1) * (rh + 1)));
#pragma omp for schedule(dynamic, 4)
      for (int64_t t = 0; t < qcount; ++t) {
        const int64_t x0 = q.lo[0] + t / qn1, x1 = q.lo[1] + t % qn1;
        const int64_t xi = x0 * n + x1;
        auto at = [&](int64_t i, int64_t j) -> double& { return P[i * (rh + 1) + j]; };
        for (int64_t j = 0; j <= rh; ++j) at(0, j) = 0.0;
        for (int64_t i = 0; i < rw; ++i) {
          at(i + 1, 0) = 0.0;
          double row = 0.0;
          for (int64_t j = 0; j < rh; ++j) {
            const int64_t src = (R.lo[0] + i) * n + R.lo[1] + j;
            row += op.weight(xi, src) * gfun.values[src];
            at(i + 1, j + 1) = at(i, j + 1) + row;
          }
        }
        const double total = at(rw, rh);
        for (int lev = 0; lev < levels; ++lev) {
          const int64_t side = cube_cell_side(g, k0 + lev);
          const int64_t m0 = x0 / side, m1 = x1 / side;
          const int64_t a0 = std::max(R.lo[0], (m0 - 1) * side) - R.lo[0];
          const int64_t b0 = std::min(R.hi[0], (m0 + 2) * side) - R.lo[0];
          const int64_t a1 = std::max(R.lo[1], (m1 - 1) * side) - R.lo[1];
          const int64_t b1 = std::min(R.hi[1], (m1 + 2) * side) - R.lo[1];
          const double inner = at(b0, b1) - at(a0, b1) - at(b0, a1) + at(a0, a1);
          vals[t * levels + lev] = std::abs(total - inner);
        }
      }
    }
  }

  // cell max within each cube, then max over the chain of cubes containing x
  GridFunction out(g, 0.0);
  std::vector<std::vector<double>> gmax(static_cast<size_t>(levels));
  for (int lev = 0; lev < levels; ++lev) {
    const int64_t side = cube_cell_side(g, k0 + lev);
    const int64_t c0 = qn0 / side, c1 = g.dim == 2 ? qn1 / side : 1;
    auto& gm = gmax[lev];
    gm.assign(static_cast<size_t>(c0 * c1), 0.0);
    for (int64_t t = 0; t < qcount; ++t) {
      const int64_t i0 = t / qn1 / side, i1 = g.dim == 2 ? (t % qn1) / side : 0;
      double& slot = gm[i0 * c1 + i1];
      slot = std::max(slot, vals[t * levels + lev]);
    }
  }
  for (int64_t t = 0; t < qcount; ++t) {
    double best = 0.0;
    for (int lev = 0; lev < levels; ++lev) {
      const int64_t side = cube_cell_side(g, k0 + lev);
      const int64_t c1 = g.dim == 2 ? qn1 / side : 1;
      const int64_t i0 = t / qn1 / side, i1 = g.dim == 2 ? (t % qn1) / side : 0;
      best = std::max(best, gmax[lev][i0 * c1 + i1]);
    }
    const int64_t cell = g.dim == 1 ? q.lo[0] + t : (q.lo[0] + t / qn1) * n + q.lo[1] + t % qn1;
    out.values[cell] = best;
  }
  return out;
}

}  // namespace hlab
