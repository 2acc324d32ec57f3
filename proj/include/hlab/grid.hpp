#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace hlab {

// Uniform dyadic grid on a root cube [origin, origin + side)^dim with 2^level cells per axis.
// Cell index in 2D is c0 * N + c1.
struct Grid {
  int dim = 1;
  std::array<double, 2> origin{0.0, 0.0};
  double side = 1.0;
  int level = 1;

  Grid() = default;
  Grid(int dim, std::array<double, 2> origin, double side, int level);

  int64_t per_side() const { return int64_t{1} << level; }
  int64_t cell_count() const { return dim == 1 ? per_side() : per_side() * per_side(); }
  double cell_side() const { return side / static_cast<double>(per_side()); }
  double cell_volume() const;

  std::array<int64_t, 2> coords(int64_t idx) const;
  int64_t index(std::array<int64_t, 2> c) const;
  std::array<double, 2> center(int64_t idx) const;
  std::array<double, 2> lower(int64_t idx) const;

  bool operator==(const Grid&) const = default;
};

// Piecewise constant function, one value per cell.
struct GridFunction {
  Grid grid;
  std::vector<double> values;

  GridFunction() = default;
  explicit GridFunction(const Grid& g, double fill = 0.0)
      : grid(g), values(static_cast<size_t>(g.cell_count()), fill) {}
  GridFunction(const Grid& g, std::vector<double> v);

  size_t size() const { return values.size(); }
  double& operator[](size_t i) { return values[i]; }
  double operator[](size_t i) const { return values[i]; }

  GridFunction map(const std::function<double(double)>& fn) const;
  double max_abs() const;
};

GridFunction operator*(const GridFunction& a, const GridFunction& b);
GridFunction operator+(const GridFunction& a, const GridFunction& b);
GridFunction operator-(const GridFunction& a, const GridFunction& b);
GridFunction operator*(double s, const GridFunction& a);

// Integral against Lebesgue measure.
double integral(const GridFunction& f);
// (sum |f|^p w |cell|)^{1/p}; w may be null for Lebesgue measure.
double lp_norm(const GridFunction& f, double p, const GridFunction* w = nullptr);

}  // namespace hlab
