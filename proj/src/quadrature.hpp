#pragma once

#include <array>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <functional>
#include <numbers>
#include <optional>

namespace hlab::quad {

inline double interval(const std::function<double(double)>& f, double a, double b, double tol = 1e-12) {
  if (!(b > a)) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 15, tol, &err);
}

// 4-point Gauss-Legendre on [-1,1].
inline constexpr std::array<double, 4> kGLx{-0.8611363115940526, -0.3399810435848563, 0.3399810435848563,
                                            0.8611363115940526};
inline constexpr std::array<double, 4> kGLw{0.3478548451374538, 0.6521451548625461, 0.6521451548625461,
                                            0.3478548451374538};

inline double box_gauss(const std::function<double(double, double)>& f, double x0, double x1, double y0, double y1) {
  double hx = 0.5 * (x1 - x0), hy = 0.5 * (y1 - y0), cx = 0.5 * (x0 + x1), cy = 0.5 * (y0 + y1);
  double s = 0.0;
  for (int i = 0; i < 4; ++i)
    for (int j = 0; j < 4; ++j) s += kGLw[i] * kGLw[j] * f(cx + hx * kGLx[i], cy + hy * kGLx[j]);
  return s * hx * hy;
}

// Integral of f over a box, refining toward a point singularity p. The sub-box that still
// contains p at the finest depth is replaced by the equal-area disk, whose integral is
// given by disk(rho).
inline double box_singular(const std::function<double(double, double)>& f, double x0, double x1, double y0, double y1,
                           std::array<double, 2> p, const std::function<double(double)>& disk, int depth = 8) {
  double w = x1 - x0;
  double dx = std::max({x0 - p[0], p[0] - x1, 0.0}), dy = std::max({y0 - p[1], p[1] - y1, 0.0});
  double dist = std::hypot(dx, dy);
  if (dist > w) return box_gauss(f, x0, x1, y0, y1);
  bool inside = dx == 0.0 && dy == 0.0;
  if (depth == 0) {
    if (inside) return disk(std::sqrt((x1 - x0) * (y1 - y0) / std::numbers::pi));
    return box_gauss(f, x0, x1, y0, y1);
  }
  double xm = 0.5 * (x0 + x1), ym = 0.5 * (y0 + y1);
  return box_singular(f, x0, xm, y0, ym, p, disk, depth - 1) + box_singular(f, xm, x1, y0, ym, p, disk, depth - 1) +
         box_singular(f, x0, xm, ym, y1, p, disk, depth - 1) + box_singular(f, xm, x1, ym, y1, p, disk, depth - 1);
}

}  // namespace hlab::quad
