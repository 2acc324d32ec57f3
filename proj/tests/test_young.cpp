#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "hlab/dyadic.hpp"
#include "hlab/kernel.hpp"
#include "hlab/orlicz.hpp"
#include "hlab/young.hpp"

using namespace hlab;

namespace {
const double kE = std::exp(1.0);
}

TEST_CASE("evaluation") {
  CHECK(YoungFunction::power(2)(3.0) == 9.0);
  CHECK(YoungFunction::phi(1)(0.0) == 0.0);
  CHECK(YoungFunction::llogl(1)(kE) == doctest::Approx(kE * std::log(2 * kE)).epsilon(1e-12));
  CHECK(YoungFunction::llogl(1)(kE) == doctest::Approx(4.60245).epsilon(1e-5));
}

TEST_CASE("inverse round trips") {
  CHECK(YoungFunction::power(2).inverse(9.0) == doctest::Approx(3.0));
  auto L = YoungFunction::llogl(1);
  CHECK(std::abs(L.inverse(L(kE)) - kE) < 1e-9);
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> R(1.0, 5.0), T(0.01, 100.0);
  for (int i = 0; i < 50; ++i) {
    double r = R(rng), t = T(rng);
    auto P = YoungFunction::power(r);
    CHECK(std::abs(P.inverse(P(t)) - t) <= 1e-10 * t);
  }
}

TEST_CASE("Legendre transform") {
  auto half = YoungFunction::power(2, 0.5);
  auto c = complementary(half);
  for (double t = 0.01; t <= 100.0; t *= 1.7) CHECK(std::abs(c(t) - t * t / 2) <= 1e-8 * std::max(1.0, t * t));
  auto third = YoungFunction::power(3, 1.0 / 3.0);
  auto c3 = complementary(third);
  for (double t = 0.01; t <= 100.0; t *= 1.7) {
    double want = std::pow(t, 1.5) * 2.0 / 3.0;
    CHECK(std::abs(c3(t) - want) <= 1e-8 * std::max(1.0, want));
  }
  CHECK_THROWS_AS(complementary(YoungFunction::power(1)), UnboundedConjugate);
}

TEST_CASE("bracket t <= A^{-1} Abar^{-1} <= 2t for LLogL") {
  auto A = YoungFunction::llogl(1);
  auto Ab = complementary(A);
  std::vector<double> ts{0.5, 1.0, 10.0, 1e3};
  auto st = aabar_bracket(A, Ab, ts);
  CHECK(st.min_ratio >= 1.0 - 1e-6);
  CHECK(st.max_ratio <= 2.0 + 1e-6);
}

TEST_CASE("Luxemburg averages") {
  Grid g(1, {0, 0}, 1.0, 1);
  Cube q = base_cube(g, 0, {0, 0});
  CHECK(luxemburg_norm(GridFunction(g, 3.0), q, YoungFunction::power(2)) == doctest::Approx(3.0));
  GridFunction f(g, std::vector<double>{1.0, 3.0});
  CHECK(luxemburg_norm(f, q, YoungFunction::power(2)) == doctest::Approx(std::sqrt(5.0)).epsilon(1e-9));
  CHECK(luxemburg_norm(GridFunction(g, 0.0), q, YoungFunction::llogl(1)) == 0.0);
}

TEST_CASE("class certificates") {
  auto c = young_class_certificate(YoungFunction::power(3), 3, 3);
  CHECK(c.ok);
  CHECK(c.c_p0 == doctest::Approx(1.0));
  CHECK(young_class_certificate(YoungFunction::llogl(1), 1, 1).ok);
  CHECK_FALSE(young_class_certificate(YoungFunction::power(2), 3, 3).ok);
}

TEST_CASE("B_p integral") {
  auto r = bp_check(YoungFunction::power(2), 3);
  CHECK(r.converged);
  CHECK(r.value == doctest::Approx(1.0).epsilon(1e-6));
  CHECK_FALSE(bp_check(YoungFunction::power(3), 3).converged);
  CHECK(bp_check(YoungFunction::llogl(1), 2).converged);
}

TEST_CASE("kappa_phi") {
  auto t = YoungFunction::power(1);
  CHECK_FALSE(kappa_phi(t, YoungFunction::power(1)).converged);
  auto k = kappa_phi(t, YoungFunction::lll(0, 1.5));
  CHECK(k.converged);
  for (double eps : {0.5, 0.25, 0.125}) {
    auto ke = kappa_phi(t, YoungFunction::lll(0, 1.0 + eps));
    CHECK(ke.converged);
    CHECK(eps * ke.value < 2.0);
  }
  CHECK(kappa_phi(YoungFunction::phi(2), YoungFunction::lll(2, 1.25)).converged);
  for (int h = 0; h <= 2; ++h) {
    auto k = kappa_phi(YoungFunction::phi(h), YoungFunction::lll(h == 0 ? 0 : (h < 2 ? 1 : 2), 1.25), {true, 2, h});
    CHECK(k.converged);
    CHECK(std::isfinite(k.value));
  }
}

TEST_CASE("K_{r,A}") {
  CHECK(krA_constant(YoungFunction::power(2), 2).value == doctest::Approx(1.0));
  CHECK_FALSE(krA_constant(YoungFunction::power(4), 2).finite);
  CHECK_FALSE(krA_constant(YoungFunction::llogl(1), 1).finite);
}

TEST_CASE("generalized Holder defect") {
  Grid g(1, {0, 0}, 1.0, 6);
  Cube q = base_cube(g, 0, {0, 0});
  auto A = YoungFunction::power(2);
  CHECK(holder_defect(GridFunction(g, 1.0), GridFunction(g, 1.0), A, q) <= 2.0);
  std::mt19937_64 rng(3);
  GridFunction f(g), h(g);
  for (size_t i = 0; i < f.size(); ++i) f[i] = (rng() & 1) ? 1.0 : -1.0, h[i] = (rng() & 1) ? 2.0 : -0.5;
  CHECK(holder_defect(f, h, A, q) <= 2.001);
  GridFunction left(g, 0.0), right(g, 0.0);
  for (size_t i = 0; i < f.size(); ++i) (i < f.size() / 2 ? left : right)[i] = 1.0;
  CHECK(holder_defect(left, right, A, q) == 0.0);
}

TEST_CASE("parse errors name the token") {
  CHECK(parse_young("compose(phi(1),power(2))").to_string().find("compose") != std::string::npos);
  try {
    parse_young("powr(2)");
    FAIL("no throw");
  } catch (const std::exception& e) {
    CHECK(std::string(e.what()).find("powr") != std::string::npos);
  }
}

TEST_CASE("counterexample Young function") {
  auto A = counterexample_young(2, 1);
  // A^{-1}(u) = u^{1/2} / log(e+u)
  for (double u : {0.5, 3.0, 40.0, 1e4}) CHECK(A.inverse(u) == doctest::Approx(std::sqrt(u) / std::log(kE + u)).epsilon(1e-3));
}
