#include "hlab/operators.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hlab/parallel.hpp"

namespace hlab {

DiscreteOperator::DiscreteOperator(Kernel k, const Grid& g) : kernel_(std::move(k)), grid_(g) {
  const auto& info = kernel_.info();
  if (info.dim != g.dim) throw std::invalid_argument("kernel and grid dimensions differ");
  const int64_t n = g.per_side(), cells = g.cell_count();
  const double vol = g.cell_volume(), h = g.cell_side();
  if (info.family == KernelFamily::Matrix) {
    const auto& m = kernel_.matrix_values();
    if (m.size() != static_cast<size_t>(cells * cells)) throw std::invalid_argument("matrix kernel does not match grid");
    matrix_.resize(m.size());
    for (size_t i = 0; i < m.size(); ++i) matrix_[i] = m[i] * vol;
    return;
  }
  if (info.convolution) {
    span_ = 2 * n - 1;
    int64_t count = g.dim == 1 ? span_ : span_ * span_;
    table_.assign(static_cast<size_t>(count), 0.0);
#pragma omp parallel for schedule(dynamic, 64)
    for (int64_t t = 0; t < count; ++t) {
      int64_t d0 = (g.dim == 1 ? t : t / span_) - (n - 1);
      int64_t d1 = g.dim == 1 ? 0 : t % span_ - (n - 1);
      table_[t] = kernel_.cell_integral({static_cast<double>(d0) * h, static_cast<double>(d1) * h}, h);
    }
    return;
  }
  matrix_.resize(static_cast<size_t>(cells * cells));
#pragma omp parallel for schedule(static)
  for (int64_t i = 0; i < cells; ++i)
    for (int64_t j = 0; j < cells; ++j) {
      double v = (info.singular && i == j) ? 0.0 : kernel_(g.center(i), g.center(j)) * vol;
      matrix_[i * cells + j] = v;
    }
}

double DiscreteOperator::offset_weight(std::array<int64_t, 2> d) const {
  const int64_t n = grid_.per_side();
  if (grid_.dim == 1) return table_[d[0] + n - 1];
  return table_[(d[0] + n - 1) * span_ + d[1] + n - 1];
}

double DiscreteOperator::weight(int64_t i, int64_t j) const {
  if (!convolution()) return matrix_[i * grid_.cell_count() + j];
  auto a = grid_.coords(i), b = grid_.coords(j);
  return offset_weight({a[0] - b[0], a[1] - b[1]});
}

namespace {

// Fixed-order sum over offsets, pairing d with -d. w(d) is the weight of source i - d.
template <class W>
double conv_cell_1d(const double* f, int64_t n, int64_t i, W&& w) {
  double acc = w(0) * f[i];
  const int64_t both = std::min(i, n - 1 - i);
  for (int64_t d = 1; d <= both; ++d) acc += w(d) * f[i - d] + w(-d) * f[i + d];
  for (int64_t d = both + 1; d <= i; ++d) acc += w(d) * f[i - d];
  for (int64_t d = both + 1; d < n - i; ++d) acc += w(-d) * f[i + d];
  return acc;
}

template <class W>
double conv_cell_2d(const double* f, int64_t n, int64_t i0, int64_t i1, W&& w) {
  double acc = w(0, 0) * f[i0 * n + i1];
  for (int64_t d0 = 0; d0 < n; ++d0) {
    const bool lo0 = i0 - d0 >= 0, hi0 = i0 + d0 < n;
    if (!lo0 && !hi0) break;
    for (int64_t d1 = (d0 == 0 ? 1 : -(n - 1)); d1 < n; ++d1) {
      double a = 0.0, b = 0.0;
      int64_t a1 = i1 - d1, b1 = i1 + d1;
      if (lo0 && a1 >= 0 && a1 < n) a = w(d0, d1) * f[(i0 - d0) * n + a1];
      if (hi0 && b1 >= 0 && b1 < n) b = w(-d0, -d1) * f[(i0 + d0) * n + b1];
      acc += a + b;
    }
  }
  return acc;
}

}  // namespace

double DiscreteOperator::apply_cell(const GridFunction& f, int64_t i) const {
  const int64_t n = grid_.per_side();
  const double* fv = f.values.data();
  if (!convolution()) {
    const int64_t cells = grid_.cell_count();
    const double* row = matrix_.data() + i * cells;
    double acc = 0.0;
    for (int64_t j = 0; j < cells; ++j) acc += row[j] * fv[j];
    return acc;
  }
  const double* t = table_.data();
  if (grid_.dim == 1) {
    const double* c = t + (n - 1);
    return conv_cell_1d(fv, n, i, [c](int64_t d) { return c[d]; });
  }
  const double* c = t + (n - 1) * span_ + (n - 1);
  const int64_t s = span_;
  return conv_cell_2d(fv, n, i / n, i % n, [c, s](int64_t d0, int64_t d1) { return c[d0 * s + d1]; });
}

GridFunction DiscreteOperator::apply(const GridFunction& f) const {
  if (!(f.grid == grid_)) throw std::invalid_argument("function and operator grids differ");
  GridFunction out(grid_);
  const int64_t cells = grid_.cell_count();
#pragma omp parallel for schedule(dynamic, 16)
  for (int64_t i = 0; i < cells; ++i) out.values[i] = apply_cell(f, i);
  return out;
}

GridFunction DiscreteOperator::apply_serial(const GridFunction& f) const {
  if (!(f.grid == grid_)) throw std::invalid_argument("function and operator grids differ");
  GridFunction out(grid_);
  for (int64_t i = 0; i < grid_.cell_count(); ++i) out.values[i] = apply_cell(f, i);
  return out;
}

GridFunction DiscreteOperator::apply_adjoint(const GridFunction& f) const {
  if (!(f.grid == grid_)) throw std::invalid_argument("function and operator grids differ");
  GridFunction out(grid_);
  const int64_t n = grid_.per_side(), cells = grid_.cell_count();
  const double* fv = f.values.data();
  if (!convolution()) {
#pragma omp parallel for schedule(static)
    for (int64_t j = 0; j < cells; ++j) {
      double acc = 0.0;
      for (int64_t i = 0; i < cells; ++i) acc += matrix_[i * cells + j] * fv[i];
      out.values[j] = acc;
    }
    return out;
  }
  if (grid_.dim == 1) {
    const double* c = table_.data() + (n - 1);
#pragma omp parallel for schedule(dynamic, 16)
    for (int64_t i = 0; i < cells; ++i) out.values[i] = conv_cell_1d(fv, n, i, [c](int64_t d) { return c[-d]; });
    return out;
  }
  const double* c = table_.data() + (n - 1) * span_ + (n - 1);
  const int64_t s = span_;
#pragma omp parallel for schedule(dynamic, 16)
  for (int64_t i = 0; i < cells; ++i)
    out.values[i] = conv_cell_2d(fv, n, i / n, i % n, [c, s](int64_t d0, int64_t d1) { return c[-d0 * s - d1]; });
  return out;
}

double DiscreteOperator::evaluate_at(const GridFunction& f, Point x) const {
  const int64_t cells = grid_.cell_count();
  const double h = grid_.cell_side(), vol = grid_.cell_volume();
  double acc = 0.0;
  for (int64_t j = 0; j < cells; ++j) {
    if (f.values[j] == 0.0) continue;
    auto y = grid_.center(j);
    double w = kernel_.info().convolution ? kernel_.cell_integral({x[0] - y[0], x[1] - y[1]}, h) : kernel_(x, y) * vol;
    acc += w * f.values[j];
  }
  return acc;
}

namespace {

double binom(int m, int h) {
  double r = 1.0;
  for (int i = 1; i <= h; ++i) r = r * (m - h + i) / i;
  return r;
}

}  // namespace

GridFunction commutator_apply(const DiscreteOperator& op, const GridFunction& b, int m, const GridFunction& f,
                              double c) {
  if (m < 0 || m > 4) throw std::invalid_argument("commutator order must lie in [0,4]");
  if (m == 0) return op.apply(f);
  const size_t n = f.size();
  std::vector<double> d(n);
  for (size_t i = 0; i < n; ++i) d[i] = b.values[i] - c;
  GridFunction out(f.grid, 0.0);
  GridFunction g = f;
  for (int h = 0; h <= m; ++h) {
    if (h > 0)
      for (size_t i = 0; i < n; ++i) g.values[i] *= d[i];
    GridFunction tg = op.apply(g);
    double coef = (h % 2 ? -1.0 : 1.0) * binom(m, h);
    for (size_t i = 0; i < n; ++i) {
      double p = 1.0;
      for (int k = 0; k < m - h; ++k) p *= d[i];
      out.values[i] += coef * p * tg.values[i];
    }
  }
  return out;
}

GridFunction commutator_recursive(const DiscreteOperator& op, const GridFunction& b, int m, const GridFunction& f) {
  if (m == 0) return op.apply(f);
  GridFunction left = b * commutator_recursive(op, b, m - 1, f);
  GridFunction right = commutator_recursive(op, b, m - 1, b * f);
  return left - right;
}

double l2_norm_estimate(const DiscreteOperator& op, int iterations) {
  const Grid& g = op.grid();
  GridFunction v(g);
  for (size_t i = 0; i < v.size(); ++i) v.values[i] = 1.0 + 0.5 * std::sin(0.7 * static_cast<double>(i) + 0.3);
  double est = 0.0;
  for (int it = 0; it < iterations; ++it) {
    double nv = lp_norm(v, 2.0);
    for (auto& x : v.values) x /= nv;
    GridFunction w = op.apply_adjoint(op.apply(v));
    est = std::sqrt(lp_norm(w, 2.0));
    v = std::move(w);
    if (!(est > 0.0)) return 0.0;
  }
  return est;
}

double omega_modulus(const std::vector<double>& omega, const YoungFunction* B, double t) {
  if (t <= 0.0) return 0.0;
  const int pts = 512;
  const double pi = std::numbers::pi;
  std::vector<double> diff(pts);
  double best = 0.0;
  for (int ri = 1; ri <= 4; ++ri) {
    double rad = t * ri / 4.0;
    for (int ai = 0; ai < 32; ++ai) {
      double phi = 2.0 * pi * ai / 32.0;
      double y0 = rad * std::cos(phi), y1 = rad * std::sin(phi);
      for (int i = 0; i < pts; ++i) {
        double th = 2.0 * pi * i / pts;
        double x0 = std::cos(th) + y0, x1 = std::sin(th) + y1;
        double th2 = std::atan2(x1, x0);
        if (th2 < 0.0) th2 += 2.0 * pi;
        diff[i] = omega_at(omega, th2) - omega_at(omega, th);
      }
      double v = 0.0;
      if (B) {
        v = luxemburg(diff, {}, *B);
      } else {
        for (double x : diff) v = std::max(v, std::abs(x));
      }
      best = std::max(best, v);
    }
  }
  return best;
}

IntegralResult dini_integral(const std::vector<double>& omega, const YoungFunction* B, double t_min) {
  const int per_decade = 8;
  int n = static_cast<int>(std::ceil(-std::log10(t_min) * per_decade));
  std::vector<double> ts(n + 1), w(n + 1);
  for (int k = 0; k <= n; ++k) {
    ts[k] = t_min * std::pow(1.0 / t_min, static_cast<double>(k) / n);
    w[k] = omega_modulus(omega, B, ts[k]);
  }
  IntegralResult r;
  for (int k = 0; k < n; ++k) r.value += 0.5 * (w[k] + w[k + 1]) * std::log(ts[k + 1] / ts[k]);
  double a = w[0] > 0.0 ? std::log(w[per_decade] / w[0]) / std::log(ts[per_decade] / ts[0]) : 1.0;
  if (w[0] == 0.0) {
    r.converged = true;
  } else if (a > 0.1) {
    r.tail = w[0] / a;
    r.value += r.tail;
    r.converged = true;
  } else {
    r.tail = std::numeric_limits<double>::infinity();
  }
  return r;
}

}  // namespace hlab
