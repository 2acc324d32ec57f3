#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hlab/dyadic.hpp"
#include "hlab/grid.hpp"
#include "hlab/kernel.hpp"
#include "hlab/young.hpp"

namespace hlab {

// Kernel discretized on a grid: weight(i, j) ~ int_{cell j} K(x_i, y) dy.
// Convolution kernels keep a (2N-1)^n offset table; other kernels keep the full matrix.
class DiscreteOperator {
 public:
  DiscreteOperator(Kernel k, const Grid& g);

  const Grid& grid() const { return grid_; }
  const Kernel& kernel() const { return kernel_; }
  bool convolution() const { return !table_.empty(); }

  double weight(int64_t i, int64_t j) const;
  // Offset weight for displacement d = c_i - c_j in cells (convolution only).
  double offset_weight(std::array<int64_t, 2> d) const;

  GridFunction apply(const GridFunction& f) const;
  GridFunction apply_serial(const GridFunction& f) const;
  GridFunction apply_adjoint(const GridFunction& f) const;
  // Tf at an arbitrary point (center rule on source cells).
  double evaluate_at(const GridFunction& f, Point x) const;

 private:
  double apply_cell(const GridFunction& f, int64_t i) const;
  Kernel kernel_;
  Grid grid_;
  std::vector<double> table_;
  std::vector<double> matrix_;
  int64_t span_ = 0;  // 2N - 1
};

// T_b^m f through the binomial expansion around c.
GridFunction commutator_apply(const DiscreteOperator& op, const GridFunction& b, int m, const GridFunction& f,
                              double c = 0.0);
// [b, T_b^{m-1}] recursion, for testing.
GridFunction commutator_recursive(const DiscreteOperator& op, const GridFunction& b, int m, const GridFunction& f);

enum class MaximalKind { M, MA, Mdelta, MAW };

struct MaximalVariant {
  MaximalKind kind = MaximalKind::M;
  std::optional<YoungFunction> A;
  double delta = 0.5;
  const GridFunction* w = nullptr;

  static MaximalVariant plain() { return {}; }
  static MaximalVariant orlicz(YoungFunction a) { return {MaximalKind::MA, a, 0.5, nullptr}; }
  static MaximalVariant power_mean(double d) { return {MaximalKind::Mdelta, std::nullopt, d, nullptr}; }
  static MaximalVariant weighted(YoungFunction a, const GridFunction* w) { return {MaximalKind::MAW, a, 0.5, w}; }
  static MaximalVariant lll(double l, double alpha) { return orlicz(YoungFunction::lll(l, alpha)); }
};

GridFunction maximal(const GridFunction& f, const MaximalVariant& v, const CubeScope& scope = {});
GridFunction maximal_serial(const GridFunction& f, const MaximalVariant& v, const CubeScope& scope = {});

// Sup over base cubes x in Q within Q0 of the cell max over Q of |T(g chi_{3Q0 \ 3Q})|.
// Values outside Q0 are zero. 3Q0 and 3Q are clipped to the root.
GridFunction grand_maximal_truncated(const DiscreteOperator& op, const GridFunction& g, const Cube& q0);

struct HormanderOptions {
  int k_max = 6;
  int cube_budget = 48;
  int side = 1;
  uint64_t seed = 1;
  int random_pairs = 2;
};

struct HormanderResult {
  double value = 0.0;
  double tail = 0.0;
  int cubes_used = 0;
  std::vector<double> terms;  // annulus terms of the maximizing pair
};

// A == nullptr selects the sup norm (conjugate of power(1)).
HormanderResult hormander_estimate(const DiscreteOperator& op, const YoungFunction* A, const HormanderOptions& opt = {});

double l2_norm_estimate(const DiscreteOperator& op, int iterations = 50);

// Omega(. + y) - Omega(.) on the circle, Luxemburg norm over uniform angles, sup over |y| <= t.
double omega_modulus(const std::vector<double>& omega, const YoungFunction* B, double t);
IntegralResult dini_integral(const std::vector<double>& omega, const YoungFunction* B, double t_min = 1e-4);

}  // namespace hlab
