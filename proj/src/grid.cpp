#include "hlab/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace hlab {

Grid::Grid(int dim_, std::array<double, 2> origin_, double side_, int level_)
    : dim(dim_), origin(origin_), side(side_), level(level_) {
  if (dim != 1 && dim != 2) throw std::invalid_argument("grid dimension must be 1 or 2");
  if (!(side > 0.0) || !std::isfinite(side)) throw std::invalid_argument("grid side must be positive");
  if (level < 1 || level > (dim == 1 ? 24 : 12))
    throw std::invalid_argument("grid level out of range: " + std::to_string(level));
  if (dim == 1) origin[1] = 0.0;
}

double Grid::cell_volume() const {
  double h = cell_side();
  return dim == 1 ? h : h * h;
}

std::array<int64_t, 2> Grid::coords(int64_t idx) const {
  if (dim == 1) return {idx, 0};
  int64_t n = per_side();
  return {idx / n, idx % n};
}

int64_t Grid::index(std::array<int64_t, 2> c) const {
  return dim == 1 ? c[0] : c[0] * per_side() + c[1];
}

std::array<double, 2> Grid::center(int64_t idx) const {
  auto c = coords(idx);
  double h = cell_side();
  std::array<double, 2> x{origin[0] + (static_cast<double>(c[0]) + 0.5) * h, 0.0};
  if (dim == 2) x[1] = origin[1] + (static_cast<double>(c[1]) + 0.5) * h;
  return x;
}

std::array<double, 2> Grid::lower(int64_t idx) const {
  auto c = coords(idx);
  double h = cell_side();
  std::array<double, 2> x{origin[0] + static_cast<double>(c[0]) * h, 0.0};
  if (dim == 2) x[1] = origin[1] + static_cast<double>(c[1]) * h;
  return x;
}

GridFunction::GridFunction(const Grid& g, std::vector<double> v) : grid(g), values(std::move(v)) {
  if (values.size() != static_cast<size_t>(g.cell_count()))
    throw std::invalid_argument("grid function size does not match grid");
}

GridFunction GridFunction::map(const std::function<double(double)>& fn) const {
  GridFunction out(grid);
  for (size_t i = 0; i < values.size(); ++i) out.values[i] = fn(values[i]);
  return out;
}

double GridFunction::max_abs() const {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return m;
}

namespace {
void require_same(const GridFunction& a, const GridFunction& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("grid functions live on different grids");
}
}  // namespace

GridFunction operator*(const GridFunction& a, const GridFunction& b) {
  require_same(a, b);
  GridFunction out(a.grid);
  for (size_t i = 0; i < a.size(); ++i) out.values[i] = a.values[i] * b.values[i];
  return out;
}

GridFunction operator+(const GridFunction& a, const GridFunction& b) {
  require_same(a, b);
  GridFunction out(a.grid);
  for (size_t i = 0; i < a.size(); ++i) out.values[i] = a.values[i] + b.values[i];
  return out;
}

GridFunction operator-(const GridFunction& a, const GridFunction& b) {
  require_same(a, b);
  GridFunction out(a.grid);
  for (size_t i = 0; i < a.size(); ++i) out.values[i] = a.values[i] - b.values[i];
  return out;
}

GridFunction operator*(double s, const GridFunction& a) {
  GridFunction out(a.grid);
  for (size_t i = 0; i < a.size(); ++i) out.values[i] = s * a.values[i];
  return out;
}

double integral(const GridFunction& f) {
  double s = 0.0;
  for (double v : f.values) s += v;
  return s * f.grid.cell_volume();
}

double lp_norm(const GridFunction& f, double p, const GridFunction* w) {
  if (w && !(w->grid == f.grid)) throw std::invalid_argument("weight lives on a different grid");
  if (std::isinf(p)) return f.max_abs();
  double s = 0.0;
  for (size_t i = 0; i < f.size(); ++i) {
    double t = std::pow(std::abs(f.values[i]), p);
    s += w ? t * w->values[i] : t;
  }
  return std::pow(s * f.grid.cell_volume(), 1.0 / p);
}

}  // namespace hlab
