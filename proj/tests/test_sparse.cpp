#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "hlab/functions.hpp"
#include "hlab/sparse.hpp"

using namespace hlab;

namespace {
const YoungFunction kOne = YoungFunction::power(1);
}

TEST_CASE("zero input") {
  Grid g(1, {0, 0}, 1.0, 8);
  DiscreteOperator op(Kernel::hilbert(), g);
  GridFunction z(g, 0.0);
  auto q0 = base_cube(g, 0, {0, 0});
  auto form = build_sparse_family(op, z, 1, kOne, z, q0);
  REQUIRE(form.family.cubes.size() == 1);
  CHECK(form.family.cubes[0] == q0);
  for (double c : form.coef[0]) CHECK(c == 0.0);
  CHECK(exceptional_set(op, z, z, 0, q0, 1.0, kOne, 1.0).empty());
  auto d = domination_report(op, z, 0, kOne, z, q0);
  CHECK(d.c_star == 0.0);
  CHECK(d.violations == 0);
}

TEST_CASE("exceptional set shrinks with alpha") {
  Grid g(1, {0, 0}, 1.0, 8);
  DiscreteOperator op(Kernel::hilbert(), g);
  auto f = make_function(g, "indicator(0,0.25)");
  GridFunction b(g, 0.0);
  auto q0 = base_cube(g, 0, {0, 0});
  size_t prev = g.cell_count() + 1;
  for (double a = 0.125; a < 1e4; a *= 4) {
    auto e = exceptional_set(op, f, b, 0, q0, a, kOne, 1.0);
    CHECK(e.size() <= prev);
    prev = e.size();
  }
  CHECK(prev == 0);
}

TEST_CASE("engine family on an indicator") {
  Grid g(1, {0, 0}, 1.0, 10);
  DiscreteOperator op(Kernel::hilbert(), g);
  auto f = make_function(g, "indicator(0,0.25)");
  auto q0 = base_cube(g, 0, {0, 0});
  auto form = build_sparse_family(op, GridFunction(g, 0.0), 0, kOne, f, q0);
  CHECK_FALSE(form.partial);
  CHECK(static_cast<int64_t>(form.family.cubes.size()) <= EngineOptions{}.node_budget);
  for (const auto& n : form.nodes) CHECK(n.child_fraction <= 0.5 + 1e-12);
  form.family.eta = 0.5;
  CHECK(check_sparse(g, form.family).ok);

  auto vals = sparse_form_eval(form, GridFunction(g, 0.0));
  GridFunction want(g, 0.0);
  for (size_t i = 0; i < form.family.cubes.size(); ++i)
    for (int64_t c = 0; c < g.cell_count(); ++c)
      if (cube_contains_cell(g, form.family.cubes[i], c)) want[c] += form.coef[i][0];
  for (int64_t c = 0; c < g.cell_count(); ++c) CHECK(vals.total[c] == doctest::Approx(want[c]).epsilon(1e-12));
  for (int64_t c = 0; c < g.cell_count(); ++c) CHECK(vals.total[c] >= form.coef[0][0] * (1 - 1e-12));
}

TEST_CASE("domination with a commutator") {
  Grid g(1, {0, 0}, 1.0, 9);
  DiscreteOperator op(Kernel::hilbert(), g);
  auto f = make_function(g, "indicator(0,0.25)");
  auto b = make_function(g, "log_abs(0.37)");
  auto d = domination_report(op, b, 1, YoungFunction::power(1.1), f, base_cube(g, 0, {0, 0}));
  CHECK(std::isfinite(d.c_star));
  CHECK(d.violations == 0);
  CHECK(d.sparse_ok);
}

TEST_CASE("Hilbert C* is stable across levels") {
  std::vector<double> cs;
  for (int L : {8, 10, 12}) {
    Grid g(1, {0, 0}, 1.0, L);
    DiscreteOperator op(Kernel::hilbert(), g);
    auto f = make_function(g, "indicator(0,0.25)");
    cs.push_back(domination_report(op, GridFunction(g, 0.0), 0, kOne, f, base_cube(g, 0, {0, 0})).c_star);
  }
  for (double c : cs) CHECK(std::abs(c / cs[1] - 1) <= 0.25);
}
