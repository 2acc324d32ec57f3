#pragma once

#include <span>
#include <vector>

#include "hlab/grid.hpp"
#include "hlab/report.hpp"
#include "hlab/scenario.hpp"
#include "hlab/young.hpp"

namespace hlab {

Report run_scenario(const Scenario& s);

Report strong_cf_check(const Scenario& s);
Report endpoint_check(const Scenario& s);  // endpoint and endpoint_czo
Report expdecay_check(const Scenario& s);
Report counterexample_probe(const Scenario& s);
Report sparse_check(const Scenario& s);
Report constants_dump(const Scenario& s);

// 64 log-spaced points over [1e-3, 1e3] * scale.
std::vector<double> lambda_grid(double scale);

// sum over cells with |t| > lambda of w |cell|; w null means Lebesgue.
double level_measure(const GridFunction& t, double lambda, const GridFunction* w = nullptr);

// sup over lambda > 0 of lambda^p w{|t| > lambda}, attained just below a cell value.
double weak_type_sup(const GridFunction& t, const GridFunction& w, double p);

struct LineFit {
  double slope = 0.0, intercept = 0.0;
  double rms = 0.0;    // root mean square residual
  double range = 0.0;  // max y - min y
  int points = 0;
};
LineFit fit_line(std::span<const double> x, std::span<const double> y);

// max over a log sample grid of A(xy) / (A(x) A(y)).
double submultiplicative_ratio(const YoungFunction& A);

// Bbar^{-1}; the conjugate of c t is the indicator of [0, c], whose inverse is c.
double conjugate_inverse(const YoungFunction& B, double t);

// sup over t in [t0, 1e6] of A^{-1}(t) Bbar^{-1}(t) Cbar^{-1}(t) / t with Cbar^{-1}(t) = log(1+t)^m.
double cf_condition_sup(const YoungFunction& A, const YoungFunction& B, int m, double t0 = 1.0);

}  // namespace hlab
