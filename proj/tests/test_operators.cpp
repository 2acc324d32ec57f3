#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numeric>
#include <random>

#include "hlab/functions.hpp"
#include "hlab/kernel.hpp"
#include "hlab/operators.hpp"
#include "hlab/parallel.hpp"

using namespace hlab;

TEST_CASE("kernel values") {
  CHECK(Kernel::hilbert()({2, 0}, {0, 0}) == 0.5);
  auto k = Kernel::counterexample(2, 1, 0, 1, YoungFunction::power(2));
  // A^{-1}(u) = sqrt(u) at u = 1 / (e^{-1} 2^2)
  CHECK(k.profile(std::exp(-1.0)) == doctest::Approx(std::sqrt(std::exp(1.0) / 4)).epsilon(1e-9));
  std::vector<double> cosv(64), ones(64, 1.0);
  for (int i = 0; i < 64; ++i) cosv[i] = std::cos(2 * M_PI * i / 64);
  CHECK_NOTHROW(Kernel::homogeneous(cosv));
  CHECK_THROWS(Kernel::homogeneous(ones));
}

TEST_CASE("constant kernel integrates") {
  Grid g(1, {0, 0}, 1.0, 6);
  DiscreteOperator op(Kernel::generic([](Point, Point) { return 1.0; }), g);
  auto f = make_function(g, "sin(3) + power_abs(0.5)");
  double I = integral(f);
  auto t = op.apply(f);
  for (double v : t.values) CHECK(v == doctest::Approx(I).epsilon(1e-12));
}

TEST_CASE("Hilbert transform of an indicator") {
  Grid g(1, {0, 0}, 4.0, 12);
  DiscreteOperator op(Kernel::hilbert(), g);
  auto f = make_function(g, "indicator(0,1)");
  CHECK(op.evaluate_at(f, {2.0, 0}) == doctest::Approx(std::log(2.0)).epsilon(0.01));
  Grid s(1, {-1, 0}, 2.0, 8);
  DiscreteOperator hs(Kernel::hilbert(), s);
  auto e = make_function(s, "indicator(-0.5,0.5)");
  auto te = hs.apply(e);
  CHECK(std::abs(te[127] + te[128]) <= 1e-12);
}

TEST_CASE("serial and parallel agree") {
  Grid g(1, {0, 0}, 1.0, 9);
  DiscreteOperator op(make_kernel("dini(omega=power(0.5))"), g);
  auto f = make_function(g, "steps(7,4)");
  set_threads(4);
  auto a = op.apply(f), b = op.apply_serial(f);
  CHECK(a.values == b.values);
  auto v = MaximalVariant::orlicz(YoungFunction::llogl(1));
  CHECK(maximal(f, v).values == maximal_serial(f, v).values);
}

TEST_CASE("commutators") {
  Grid g(1, {0, 0}, 1.0, 2);
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> U(-1, 1);
  std::vector<double> mv(16);
  for (auto& x : mv) x = U(rng);
  DiscreteOperator op(Kernel::matrix(mv, 4), g);
  GridFunction b(g, std::vector<double>{0, 1, 2, 3}), f(g);
  for (auto& x : f.values) x = U(rng);
  auto t0 = commutator_apply(op, b, 0, f);
  CHECK(t0.values == op.apply(f).values);
  auto t1 = commutator_apply(op, b, 1, f);
  auto direct = b * op.apply(f) - op.apply(b * f);
  for (size_t i = 0; i < 4; ++i) CHECK(std::abs(t1[i] - direct[i]) <= 1e-12);
  auto c = commutator_apply(op, GridFunction(g, 5.0), 1, f, 5.0);
  for (double x : c.values) CHECK(x == 0.0);
}

TEST_CASE("maximal functions") {
  Grid g(1, {0, 0}, 1.0, 6);
  auto f = make_function(g, "indicator(0,0.25)");
  auto m = maximal(f, MaximalVariant::plain(), {false, 0, -1});
  for (int i = 32; i < 64; ++i) CHECK(m[i] == doctest::Approx(0.25).epsilon(1e-14));
  GridFunction c(g, 2.5);
  for (double x : maximal(c, MaximalVariant::plain()).values) CHECK(x == doctest::Approx(2.5).epsilon(1e-12));
  for (double x : maximal(c, MaximalVariant::power_mean(0.5)).values) CHECK(x == doctest::Approx(2.5).epsilon(1e-9));
  // the Luxemburg average of a constant c is c / A^{-1}(1)
  auto L = YoungFunction::llogl(1);
  for (double x : maximal(c, MaximalVariant::orlicz(L)).values) CHECK(x == doctest::Approx(2.5 / L.inverse(1.0)).epsilon(1e-9));
  auto mp = maximal(make_function(g, "sin(3)"), MaximalVariant::plain());
  auto ma = maximal(make_function(g, "sin(3)"), MaximalVariant::orlicz(YoungFunction::llogl(1)));
  for (size_t i = 0; i < mp.size(); ++i) CHECK(mp[i] <= ma[i] * (1 + 1e-9));
}

TEST_CASE("grand maximal truncation") {
  Grid g(1, {0, 0}, 1.0, 6);
  DiscreteOperator op(Kernel::hilbert(), g);
  auto z = grand_maximal_truncated(op, GridFunction(g, 0.0), base_cube(g, 1, {0, 0}));
  for (double x : z.values) CHECK(x == 0.0);
}

TEST_CASE("Hormander estimates") {
  Grid g(1, {0, 0}, 1.0, 8);
  DiscreteOperator flat(Kernel::generic([](Point, Point y) { return std::sin(7 * y[0]); }), g);
  CHECK(hormander_estimate(flat, nullptr).value == 0.0);
  DiscreteOperator h(Kernel::hilbert(), g);
  auto r = hormander_estimate(h, nullptr);
  CHECK(std::isfinite(r.value));
  CHECK(r.value > 0);
}

TEST_CASE("angular modulus") {
  std::vector<double> cosv(256), jump(256);
  for (int i = 0; i < 256; ++i) {
    double th = 2 * M_PI * i / 256;
    cosv[i] = std::cos(th);
    jump[i] = th < M_PI ? 1.0 : -1.0;
  }
  auto B = YoungFunction::power(2);
  for (double t : {0.05, 0.1, 0.4}) CHECK(omega_modulus(cosv, &B, t) <= t * 1.01);
  CHECK(omega_modulus(cosv, &B, 0.0) == 0.0);
  CHECK(dini_integral(cosv, &B).converged);
  auto one = YoungFunction::power(1);
  CHECK(omega_modulus(jump, &one, 0.1) < omega_modulus(jump, &one, 0.4));
}
