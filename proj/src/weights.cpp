#include "hlab/weights.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "hlab/operators.hpp"
#include "hlab/orlicz.hpp"

namespace hlab {

namespace {

void require_positive(const GridFunction& w) {
  for (double v : w.values)
    if (!(v > 0.0)) throw std::invalid_argument("weight has a nonpositive cell");
}

struct Avg2 {
  double a = 0.0, b = 0.0;
};

// Averages of f and g over q.
template <class F, class G>
Avg2 averages(const Grid& g, const Cube& q, F&& f, G&& h) {
  double s = 0.0, t = 0.0, m = 0.0;
  for_each_cell(g, q, [&](int64_t c, double fr) {
    s += f(c) * fr;
    t += h(c) * fr;
    m += fr;
  });
  return {s / m, t / m};
}

int top_level(const Grid& g, const CubeScope& s) { return s.max_level < 0 ? g.level : std::min(s.max_level, g.level); }

// Fujii-Wilson with the dyadic maximal function of each lattice: for Q in lattice j,
// M(w chi_Q) at a point of Q is the max of averages along the chain of j-cubes between Q and the leaf.
double ainf_fw(const GridFunction& w, const CubeScope& scope) {
  const Grid& g = w.grid;
  const int kmax = top_level(g, scope), kmin = std::max(0, scope.min_level);
  const int lcount = scope.all_lattices ? lattice_count(g) : 1;
  double best = 0.0;
  for (int j = 0; j < lcount; ++j) {
    auto lc = cube_counts(g, j, g.level);
    if (g.dim == 1) lc[1] = 1;
    const int64_t leaves = lc[0] * lc[1];
    if (leaves <= 0) continue;
    std::vector<double> cm(static_cast<size_t>(leaves), 0.0);
    std::vector<std::array<int64_t, 2>> unit(static_cast<size_t>(leaves));
    for (int64_t t = 0; t < leaves; ++t) {
      Cube leaf{j, g.level, {t / lc[1], t % lc[1]}};
      Box u = cube_units(g, leaf);
      unit[t] = {u.lo[0] + 1, g.dim == 2 ? u.lo[1] + 1 : 0};
    }
    for (int k = g.level; k >= kmin; --k) {
      auto cc = cube_counts(g, j, k);
      if (g.dim == 1) cc[1] = 1;
      if (cc[0] <= 0 || cc[1] <= 0) continue;
      const int64_t cubes = cc[0] * cc[1];
      std::vector<double> avg(static_cast<size_t>(cubes));
#pragma omp parallel for schedule(dynamic, 16)
      for (int64_t t = 0; t < cubes; ++t) {
        Cube q{j, k, {t / cc[1], t % cc[1]}};
        avg[t] = averages(g, q, [&](int64_t c) { return w.values[c]; }, [](int64_t) { return 0.0; }).a;
      }
      std::vector<double> sum(static_cast<size_t>(cubes), 0.0);
      std::vector<int64_t> cnt(static_cast<size_t>(cubes), 0);
      for (int64_t t = 0; t < leaves; ++t) {
        Cube a = cube_containing_unit(g, j, k, unit[t]);
        if (a.coord[0] < 0 || a.coord[0] >= cc[0] || a.coord[1] < 0 || a.coord[1] >= cc[1]) continue;
        const int64_t ai = a.coord[0] * cc[1] + a.coord[1];
        cm[t] = std::max(cm[t], avg[ai]);
        sum[ai] += cm[t];
        ++cnt[ai];
      }
      if (k > kmax) continue;
      for (int64_t t = 0; t < cubes; ++t)
        if (cnt[t] > 0) best = std::max(best, sum[t] / static_cast<double>(cnt[t]) / avg[t]);
    }
  }
  return best;
}

}  // namespace

GridFunction dual_weight(const GridFunction& w, double s) {
  if (!(s > 1.0)) throw std::invalid_argument("dual weight needs exponent > 1");
  require_positive(w);
  const double e = -1.0 / (s - 1.0);
  return w.map([e](double v) { return std::pow(v, e); });
}

double weight_constant(const GridFunction& w, const WeightSpec& kind, const CubeScope& scope) {
  require_positive(w);
  const Grid& g = w.grid;
  switch (kind.kind) {
    case WeightKind::A1: {
      GridFunction mw = maximal(w, MaximalVariant::plain(), scope);
      double best = 0.0;
      for (size_t i = 0; i < w.size(); ++i) best = std::max(best, mw.values[i] / w.values[i]);
      return best;
    }
    case WeightKind::AinfFW:
      return ainf_fw(w, scope);
    case WeightKind::Ap:
    case WeightKind::ApBump: {
      if (!(kind.p > 1.0)) throw std::invalid_argument("A_p constant needs p > 1");
      if (kind.kind == WeightKind::ApBump && !kind.C) throw std::invalid_argument("bump constant needs C");
      const auto cubes = scope_cubes(g, scope);
      const double p = kind.p, e = -1.0 / (p - 1.0);
      GridFunction wp = w.map([p](double v) { return std::pow(v, -1.0 / p); });
      double best = 0.0;
#pragma omp parallel for schedule(dynamic, 16) reduction(max : best)
      for (size_t t = 0; t < cubes.size(); ++t) {
        double v;
        if (kind.kind == WeightKind::Ap) {
          auto a = averages(g, cubes[t], [&](int64_t c) { return w.values[c]; },
                            [&](int64_t c) { return std::pow(w.values[c], e); });
          v = a.a * std::pow(a.b, p - 1.0);
        } else {
          double aw = cube_average(w, cubes[t]);
          v = aw * std::pow(luxemburg_norm(wp, cubes[t], *kind.C), p);
        }
        best = std::max(best, v);
      }
      return best;
    }
  }
  return 0.0;
}

AbsorptionResult absorption_check(const GridFunction& w, const Cube& q, const std::vector<int64_t>& e, double c_n,
                                  double ainf) {
  require_positive(w);
  AbsorptionResult r;
  double wq = 0.0, mq = 0.0;
  std::vector<double> frac(w.size(), 0.0);
  for_each_cell(w.grid, q, [&](int64_t c, double fr) {
    wq += w.values[c] * fr;
    mq += fr;
    frac[c] = fr;
  });
  double we = 0.0, me = 0.0;
  for (int64_t c : e) {
    if (frac[c] == 0.0) throw std::invalid_argument("absorption set leaves the cube");
    we += w.values[c] * frac[c];
    me += frac[c];
  }
  r.lhs = we / wq;
  r.base = me / mq;
  r.rhs = 2.0 * std::pow(r.base, 1.0 / (c_n * ainf));
  r.pass = r.lhs <= r.rhs * (1.0 + 1e-12);
  return r;
}

double fit_absorption_constant(const std::vector<AbsorptionResult>& instances, double ainf) {
  double c = 1e-12;
  for (const auto& r : instances) {
    if (r.lhs <= 0.0 || r.base >= 1.0) continue;
    c = std::max(c, std::log(r.base) / (ainf * std::log(r.lhs / 2.0)));
  }
  return c;
}

ReverseHolderResult reverse_holder_at(const GridFunction& w, const Cube& q, double r) {
  require_positive(w);
  auto a = averages(w.grid, q, [&](int64_t c) { return std::pow(w.values[c], r); },
                    [&](int64_t c) { return w.values[c]; });
  ReverseHolderResult res;
  res.r = r;
  res.lhs = std::pow(a.a, 1.0 / r);
  res.rhs = 2.0 * a.b;
  res.pass = res.lhs <= res.rhs * (1.0 + 1e-12);
  return res;
}

ReverseHolderResult reverse_holder_check(const GridFunction& w, const Cube& q, double tau, double ainf) {
  return reverse_holder_at(w, q, 1.0 + 1.0 / (tau * ainf));
}

double fit_reverse_holder_tau(const std::vector<std::pair<const GridFunction*, Cube>>& instances,
                              const std::vector<double>& ainf) {
  if (instances.size() != ainf.size()) throw std::invalid_argument("one A_inf constant per instance");
  for (double tau = 1.0; tau <= 0x1p40; tau *= 2.0) {
    bool ok = true;
    for (size_t i = 0; i < instances.size() && ok; ++i)
      ok = reverse_holder_check(*instances[i].first, instances[i].second, tau, ainf[i]).pass;
    if (ok) return tau;
  }
  return std::numeric_limits<double>::infinity();
}

double bmo_norm(const GridFunction& b, const CubeScope& scope) {
  const auto cubes = scope_cubes(b.grid, scope);
  double best = 0.0;
#pragma omp parallel for schedule(dynamic, 16) reduction(max : best)
  for (size_t t = 0; t < cubes.size(); ++t) {
    double bq = cube_average(b, cubes[t]);
    double s = 0.0, m = 0.0;
    for_each_cell(b.grid, cubes[t], [&](int64_t c, double fr) {
      s += std::abs(b.values[c] - bq) * fr;
      m += fr;
    });
    best = std::max(best, s / m);
  }
  return best;
}

JNProfile jn_profile(const GridFunction& b, const Cube& q, std::optional<double> bmo) {
  JNProfile p;
  const double norm = bmo ? *bmo : bmo_norm(b);
  const double bq = cube_average(b, q);
  std::vector<std::pair<double, double>> dev;
  double total = 0.0, top = 0.0;
  for_each_cell(b.grid, q, [&](int64_t c, double fr) {
    double d = std::abs(b.values[c] - bq);
    dev.push_back({d, fr});
    total += fr;
    top = std::max(top, d);
  });
  if (!(norm > 0.0) || !(top > 0.0)) return p;  // constant b: no fit
  const int n = b.grid.dim;
  p.bound_slope = -1.0 / (std::ldexp(1.0, n) * std::numbers::e * norm);
  const int pts = 64;
  for (int i = 0; i < pts; ++i) {
    double a = top * (i + 0.5) / pts;
    double m = 0.0;
    for (auto [d, fr] : dev)
      if (d > a) m += fr;
    m /= total;
    p.alpha.push_back(a);
    p.measure.push_back(m);
    if (m > std::numbers::e * std::exp(p.bound_slope * a) * (1.0 + 1e-12)) p.envelope_ok = false;
  }
  // least squares on the nonempty part
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int cnt = 0;
  for (int i = 0; i < pts; ++i) {
    if (p.measure[i] <= 0.0) continue;
    double x = p.alpha[i], y = std::log(p.measure[i]);
    sx += x, sy += y, sxx += x * x, sxy += x * y;
    ++cnt;
  }
  if (cnt < 2) return p;
  double den = cnt * sxx - sx * sx;
  if (!(den > 0.0)) return p;
  p.fit_ok = true;
  p.slope = (cnt * sxy - sx * sy) / den;
  p.intercept = (sy - p.slope * sx) / cnt;
  double ss = 0.0;
  for (int i = 0; i < pts; ++i) {
    if (p.measure[i] <= 0.0) continue;
    double r = std::log(p.measure[i]) - (p.intercept + p.slope * p.alpha[i]);
    ss += r * r;
  }
  p.residual = std::sqrt(ss / cnt);
  p.slope_pass = p.slope <= 0.5 * p.bound_slope;
  return p;
}

OscExp osc_exp_norm(const GridFunction& b, const Cube& q, const GridFunction* w, int j) {
  if (j < 1) throw std::invalid_argument("oscillation power must be >= 1");
  const double bq = cube_average(b, q);
  std::vector<double> d, dj, mu;
  for_each_cell(b.grid, q, [&](int64_t c, double fr) {
    double m = fr;
    if (w) {
      if (!(w->values[c] > 0.0)) throw std::invalid_argument("nonpositive weight cell");
      m *= w->values[c];
    }
    double x = std::abs(b.values[c] - bq);
    d.push_back(x);
    dj.push_back(std::pow(x, j));
    mu.push_back(m);
  });
  OscExp r;
  r.value = luxemburg(dj, mu, YoungFunction::expl(1.0 / j));
  double base = luxemburg(d, mu, YoungFunction::expl(1.0));
  double ref = std::pow(base, j);
  r.identity_ratio = ref > 0.0 ? r.value / ref : (r.value == 0.0 ? 1.0 : std::numeric_limits<double>::infinity());
  return r;
}

}  // namespace hlab
