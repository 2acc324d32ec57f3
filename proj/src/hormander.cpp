#include <algorithm>
#include <cmath>
#include <limits>
#include <random>

#include "hlab/operators.hpp"

namespace hlab {

namespace {

struct PairResult {
  double sum = 0.0;
  std::vector<double> terms;
};

std::vector<Cube> sample_cubes(const Grid& g, int budget) {
  const int64_t n = g.per_side();
  std::vector<int> levels;
  for (int k = g.level - 2; k >= 1; --k) levels.push_back(k);  // side >= 4 cells, 2Q may fit
  if (levels.empty()) return {};
  const int per_level = std::max(1, (budget + static_cast<int>(levels.size()) - 1) / static_cast<int>(levels.size()));
  std::vector<Cube> out;
  for (int k : levels) {
    const int64_t side = cube_cell_side(g, k), cnt = n / side;
    std::vector<std::pair<double, Cube>> cand;
    for (int64_t a = 0; a < cnt; ++a)
      for (int64_t b = 0; b < (g.dim == 2 ? cnt : 1); ++b) {
        double ca = (a + 0.5) * side - 0.5 * n, cb = g.dim == 2 ? (b + 0.5) * side - 0.5 * n : 0.0;
        cand.push_back({ca * ca + cb * cb, Cube{0, k, {a, b}}});
      }
    std::stable_sort(cand.begin(), cand.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
    for (int i = 0; i < per_level && i < static_cast<int>(cand.size()); ++i) out.push_back(cand[i].second);
    if (static_cast<int>(out.size()) >= budget) break;
  }
  if (static_cast<int>(out.size()) > budget) out.resize(static_cast<size_t>(budget));
  return out;
}

PairResult pair_sum(const DiscreteOperator& op, const YoungFunction* A, const Cube& q, int64_t x, int64_t z,
                    const HormanderOptions& opt) {
  const Grid& g = op.grid();
  const double vol = g.cell_volume();
  const double ell = g.cell_side() * static_cast<double>(cube_cell_side(g, q.level));
  PairResult r;
  std::vector<double> vals;
  for (int k = 1; k <= opt.k_max; ++k) {
    Box outer = dilate_cells(g, q, int64_t{1} << k);
    if (!box_in_root(g, outer)) break;
    Box inner = dilate_cells(g, q, int64_t{1} << (k - 1));
    vals.clear();
    for (int64_t y : box_cell_list(g, outer)) {
      auto c = g.coords(y);
      bool in_inner = c[0] >= inner.lo[0] && c[0] < inner.hi[0] &&
                      (g.dim == 1 || (c[1] >= inner.lo[1] && c[1] < inner.hi[1]));
      if (in_inner) {
        vals.push_back(0.0);
        continue;
      }
      double kx = opt.side == 1 ? op.weight(x, y) : op.weight(y, x);
      double kz = opt.side == 1 ? op.weight(z, y) : op.weight(y, z);
      vals.push_back((kx - kz) / vol);
    }
    double norm = 0.0;
    if (A) {
      norm = luxemburg(vals, {}, *A);
    } else {
      for (double v : vals) norm = std::max(norm, std::abs(v));
    }
    double scale = std::pow(std::ldexp(ell, k), g.dim);
    r.terms.push_back(scale * norm);
    r.sum += scale * norm;
  }
  return r;
}

}  // namespace

HormanderResult hormander_estimate(const DiscreteOperator& op, const YoungFunction* A, const HormanderOptions& opt) {
  if (opt.k_max < 2) throw std::invalid_argument("Hormander estimate needs k_max >= 2");
  const Grid& g = op.grid();
  auto cubes = sample_cubes(g, opt.cube_budget);
  std::vector<PairResult> best(cubes.size());
#pragma omp parallel for schedule(dynamic, 1)
  for (size_t ci = 0; ci < cubes.size(); ++ci) {
    const Cube& q = cubes[ci];
    Box b = cube_cells(g, q);
    const int64_t side = b.hi[0] - b.lo[0];
    // half cube: centered, side/2 cells per axis
    const int64_t h0 = b.lo[0] + side / 4, h1 = g.dim == 2 ? b.lo[1] + side / 4 : 0;
    const int64_t hs = side / 2;
    std::vector<int64_t> offs{0, hs / 2, hs - 1};
    std::vector<int64_t> pts;
    for (int64_t a : offs)
      for (int64_t c : (g.dim == 2 ? offs : std::vector<int64_t>{0}))
        pts.push_back(g.dim == 1 ? h0 + a : g.index({h0 + a, h1 + c}));
    std::sort(pts.begin(), pts.end());
    pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
    std::vector<std::pair<int64_t, int64_t>> pairs;
    if (g.dim == 1) {
      for (size_t i = 0; i < pts.size(); ++i)
        for (size_t j = i + 1; j < pts.size(); ++j) pairs.push_back({pts[i], pts[j]});
    } else {
      int64_t center = g.index({h0 + hs / 2, h1 + hs / 2});
      for (int64_t p : pts)
        if (p != center) pairs.push_back({center, p});
    }
    std::mt19937_64 rng(opt.seed ^ (0x9E3779B97F4A7C15ULL * (ci + 1)));
    for (int rp = 0; rp < opt.random_pairs; ++rp) {
      auto pick = [&]() {
        int64_t a = static_cast<int64_t>(rng() % static_cast<uint64_t>(hs));
        int64_t c = g.dim == 2 ? static_cast<int64_t>(rng() % static_cast<uint64_t>(hs)) : 0;
        return g.dim == 1 ? h0 + a : g.index({h0 + a, h1 + c});
      };
      int64_t x = pick(), z = pick();
      if (x != z) pairs.push_back({x, z});
    }
    PairResult top;
    for (auto [x, z] : pairs) {
      PairResult r = pair_sum(op, A, q, x, z, opt);
      if (r.sum > top.sum) top = r;
    }
    best[ci] = top;
  }
  HormanderResult res;
  res.cubes_used = static_cast<int>(cubes.size());
  for (const auto& r : best)
    if (r.sum > res.value) {
      res.value = r.sum;
      res.terms = r.terms;
    }
  const auto& t = res.terms;
  if (t.size() >= 2 && t[t.size() - 2] > 0.0) {
    double rho = t.back() / t[t.size() - 2];
    res.tail = rho < 1.0 ? t.back() * rho / (1.0 - rho) : std::numeric_limits<double>::infinity();
  }
  return res;
}

}  // namespace hlab
