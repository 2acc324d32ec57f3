#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "hlab/dyadic.hpp"
#include "hlab/grid.hpp"
#include "hlab/young.hpp"

namespace hlab {

enum class WeightKind { Ap, A1, AinfFW, ApBump };

struct WeightSpec {
  WeightKind kind = WeightKind::Ap;
  double p = 2.0;
  std::optional<YoungFunction> C;  // ApBump only

  static WeightSpec ap(double p) { return {WeightKind::Ap, p, std::nullopt}; }
  static WeightSpec a1() { return {WeightKind::A1, 1.0, std::nullopt}; }
  static WeightSpec ainf() { return {WeightKind::AinfFW, 1.0, std::nullopt}; }
  static WeightSpec bump(double p, YoungFunction c) { return {WeightKind::ApBump, p, c}; }
};

double weight_constant(const GridFunction& w, const WeightSpec& kind, const CubeScope& scope = {});

// w^{-1/(s-1)} with s = p/r.
GridFunction dual_weight(const GridFunction& w, double s);

struct AbsorptionResult {
  double lhs = 0.0;   // w(E)/w(Q)
  double base = 0.0;  // |E|/|Q|
  double rhs = 0.0;   // 2 base^{1/(c_n [w]_Ainf)}
  bool pass = false;
};

AbsorptionResult absorption_check(const GridFunction& w, const Cube& q, const std::vector<int64_t>& e, double c_n,
                                  double ainf);
// Smallest c_n making every instance pass.
double fit_absorption_constant(const std::vector<AbsorptionResult>& instances, double ainf);

struct ReverseHolderResult {
  double r = 1.0;
  double lhs = 0.0;
  double rhs = 0.0;
  bool pass = false;
};

ReverseHolderResult reverse_holder_check(const GridFunction& w, const Cube& q, double tau, double ainf);
ReverseHolderResult reverse_holder_at(const GridFunction& w, const Cube& q, double r);
// Smallest power-of-two tau passing on every (w, Q) instance.
double fit_reverse_holder_tau(const std::vector<std::pair<const GridFunction*, Cube>>& instances,
                              const std::vector<double>& ainf);

double bmo_norm(const GridFunction& b, const CubeScope& scope = {});

struct JNProfile {
  bool fit_ok = false;  // false for constant b
  double slope = 0.0, intercept = 0.0, residual = 0.0;
  double bound_slope = 0.0;  // -1/(2^n e ||b||)
  bool slope_pass = false;
  bool envelope_ok = true;  // measure <= e exp(-alpha/(2^n e ||b||)) on the grid
  std::vector<double> alpha, measure;
};

JNProfile jn_profile(const GridFunction& b, const Cube& q, std::optional<double> bmo = std::nullopt);

struct OscExp {
  double value = 0.0;           // || |b - b_Q|^j ||_{exp L^{1/j}(w), Q}
  double identity_ratio = 1.0;  // value / || b - b_Q ||_{exp L(w), Q}^j
};

OscExp osc_exp_norm(const GridFunction& b, const Cube& q, const GridFunction* w, int j);

}  // namespace hlab
