#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "hlab/functions.hpp"
#include "hlab/weights.hpp"

using namespace hlab;

TEST_CASE("constant weight") {
  Grid g(1, {0, 0}, 1.0, 6);
  GridFunction one(g, 1.0);
  CHECK(weight_constant(one, WeightSpec::ap(2)) == 1.0);
  CHECK(weight_constant(one, WeightSpec::a1()) == 1.0);
  CHECK(weight_constant(one, WeightSpec::ainf(), {false, 0, -1}) == 1.0);
}

TEST_CASE("power weight A_2 constant is stable under refinement") {
  std::vector<double> v;
  for (int L : {8, 10, 12}) {
    Grid g(1, {-1, 0}, 2.0, L);
    v.push_back(weight_constant(make_function(g, "power_abs(0.5)"), WeightSpec::ap(2)));
  }
  for (double x : v) CHECK(x >= 1.0);
  CHECK(std::abs(v[2] / v[0] - 1.0) <= 0.05);
}

TEST_CASE("dual weight") {
  Grid g(1, {-1, 0}, 2.0, 8);
  auto w = make_function(g, "power_abs(0.5)");
  double s = 3.0;
  auto sig = dual_weight(w, s);
  double a = weight_constant(w, WeightSpec::ap(s));
  double b = weight_constant(sig, WeightSpec::ap(s / (s - 1)));
  CHECK(b == doctest::Approx(std::pow(a, 1.0 / (s - 1))).epsilon(1e-6));
}

TEST_CASE("absorption") {
  Grid g(1, {0, 0}, 1.0, 6);
  GridFunction w(g, 1.0);
  Cube q = base_cube(g, 0, {0, 0});
  std::vector<int64_t> all(64);
  for (int i = 0; i < 64; ++i) all[i] = i;
  auto full = absorption_check(w, q, all, 1.0, 1.0);
  CHECK(full.lhs == 1.0);
  CHECK(full.base == 1.0);
  CHECK(full.pass);
  auto none = absorption_check(w, q, {}, 1.0, 1.0);
  CHECK(none.lhs == 0.0);
  CHECK(none.pass);
}

TEST_CASE("reverse Holder") {
  Grid g(1, {0, 0}, 1.0, 6);
  Cube q = base_cube(g, 0, {0, 0});
  auto one = reverse_holder_at(GridFunction(g, 1.0), q, 3.0);
  CHECK(one.lhs == doctest::Approx(1.0));
  CHECK(one.pass);
  auto spike = make_function(g, "1 + 100*indicator(0,0.5)");
  double ainf = weight_constant(spike, WeightSpec::ainf());
  double tau = fit_reverse_holder_tau({{&spike, q}}, {ainf});
  CHECK(std::isfinite(tau));
  CHECK(reverse_holder_check(spike, q, tau, ainf).pass);
}

TEST_CASE("BMO norms") {
  Grid g(1, {0, 0}, 1.0, 8);
  CHECK(bmo_norm(GridFunction(g, 7.0)) <= 1e-14);
  CHECK(bmo_norm(make_function(g, "indicator(0,0.5)")) == 0.5);
  std::vector<double> v;
  for (int L : {8, 10, 12}) v.push_back(bmo_norm(make_function(Grid(1, {-1, 0}, 2.0, L), "log_abs()")));
  CHECK(std::abs(v[2] / v[0] - 1.0) <= 0.10);
}

TEST_CASE("John-Nirenberg profiles") {
  Grid g(1, {0, 0}, 1.0, 8);
  Cube q = base_cube(g, 0, {0, 0});
  CHECK_FALSE(jn_profile(GridFunction(g, 2.0), q).fit_ok);
  CHECK(jn_profile(make_function(g, "indicator(0,0.5)"), q).envelope_ok);
  Grid g2(1, {-1, 0}, 2.0, 12);
  auto jl = jn_profile(make_function(g2, "log_abs()"), base_cube(g2, 0, {0, 0}));
  CHECK(jl.fit_ok);
  CHECK(jl.slope < 0);
  CHECK(jl.envelope_ok);
}

TEST_CASE("exp-oscillation identity") {
  Grid g(1, {0, 0}, 1.0, 6);
  Cube q = base_cube(g, 0, {0, 0});
  CHECK(osc_exp_norm(GridFunction(g, 3.0), q, nullptr, 1).value == 0.0);
  std::mt19937_64 rng(5);
  std::normal_distribution<double> N(0, 1);
  GridFunction b(g);
  for (auto& x : b.values) x = N(rng);
  for (int j = 1; j <= 3; ++j) CHECK(osc_exp_norm(b, q, nullptr, j).identity_ratio == doctest::Approx(1.0).epsilon(1e-8));
}
