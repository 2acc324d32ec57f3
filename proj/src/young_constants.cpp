#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>

#include "hlab/young.hpp"

namespace hlab {

namespace {

constexpr double kE = std::numbers::e;

double gk(const std::function<double(double)>& f, double a, double b) {
  if (!(b > a)) return 0.0;
  double err = 0.0;
  return boost::math::quadrature::gauss_kronrod<double, 61>::integrate(f, a, b, 20, 1e-12, &err);
}

std::vector<double> log_grid(double lo, double hi, int per_decade) {
  int n = std::max(2, static_cast<int>(std::ceil(std::log10(hi / lo) * per_decade)) + 1);
  std::vector<double> ts(static_cast<size_t>(n));
  for (int k = 0; k < n; ++k) ts[static_cast<size_t>(k)] = lo * std::pow(hi / lo, static_cast<double>(k) / (n - 1));
  return ts;
}

// Integrates G(v) on [0, vmax] where v = log log t; the tail beyond vmax is
// estimated from a power-law fit G ~ C v^{-q} on the last stretch and added to the value.
// q close to 1 is a genuine slow tail (phi with loglog^{1+eps}), so the cut is just above 1.
IntegralResult loglog_integral(const std::function<double(double)>& G, double vmax) {
  IntegralResult r;
  r.value = gk(G, 0.0, vmax);
  double v1 = 0.75 * vmax;
  double g1 = G(v1), g2 = G(vmax);
  if (!(g2 > 0.0)) {
    r.tail = 0.0;
    r.converged = std::isfinite(r.value);
    return r;
  }
  double q = std::log(g1 / g2) / std::log(vmax / v1);
  if (q > 1.0 + 1e-3) {
    r.tail = g2 * vmax / (q - 1.0);
    r.value += r.tail;
    r.converged = true;
  } else {
    r.tail = std::numeric_limits<double>::infinity();
    r.converged = false;
  }
  return r;
}

}  // namespace

BracketStats aabar_bracket(const YoungFunction& A, const YoungFunction& Abar, std::span<const double> ts) {
  BracketStats s{std::numeric_limits<double>::infinity(), 0.0};
  for (double t : ts) {
    double ratio = A.inverse(t) * Abar.inverse(t) / t;
    s.min_ratio = std::min(s.min_ratio, ratio);
    s.max_ratio = std::max(s.max_ratio, ratio);
  }
  return s;
}

ClassCertificate young_class_certificate(const YoungFunction& A, double p0, double p1, const SampleRange& grid,
                                         std::optional<double> t_A) {
  if (!(p0 >= 1.0 && p0 <= p1)) throw std::invalid_argument("class certificate needs 1 <= p0 <= p1");
  auto ts = log_grid(grid.t_min, grid.t_max, grid.per_decade);
  size_t n = ts.size();
  std::vector<double> r0(n), r1(n);
  for (size_t i = 0; i < n; ++i) {
    double a = A(ts[i]);
    r0[i] = std::pow(ts[i], p0) / a;
    r1[i] = std::pow(ts[i], p1) / a;
  }
  // running maxima: c1 over t <= t_A, c0 over t > t_A
  std::vector<double> pre(n), suf(n + 1, 1.0);
  for (size_t i = 0; i < n; ++i) pre[i] = std::max(i ? pre[i - 1] : 1.0, r1[i]);
  for (size_t i = n; i-- > 0;) suf[i] = std::max(suf[i + 1], r0[i]);

  ClassCertificate c;
  c.p0 = p0;
  c.p1 = p1;
  c.t_min = ts.front();
  c.t_max = ts.back();
  size_t best = n;
  if (t_A) {
    if (*t_A < 1.0) throw std::invalid_argument("t_A must be >= 1");
    best = static_cast<size_t>(std::upper_bound(ts.begin(), ts.end(), *t_A) - ts.begin());
    best = best == 0 ? 0 : best - 1;
    c.t_A = *t_A;
  } else {
    double score = std::numeric_limits<double>::infinity();
    for (size_t i = 0; i < n; ++i) {
      if (ts[i] < 1.0 - 1e-12) continue;
      double s = std::max(pre[i], suf[i + 1]);
      if (s < score * (1.0 - 1e-12)) {
        score = s;
        best = i;
      }
    }
    if (best == n) throw std::invalid_argument("sample grid has no point >= 1");
    c.t_A = std::max(1.0, ts[best]);
  }
  c.c_p1 = pre[best];
  c.c_p0 = suf[best + 1];

  // unbounded growth at either end of the grid means no finite constant exists
  size_t dec = static_cast<size_t>(std::max(2, grid.per_decade));
  bool grows_hi = n > dec && r0[n - 1] > r0[n - 1 - dec] * (1.0 + 1e-6) && r0[n - 1] > 1.0;
  bool grows_lo = n > dec && r1[0] > r1[dec] * (1.0 + 1e-6) && r1[0] > 1.0;
  c.ok = std::isfinite(c.c_p0) && std::isfinite(c.c_p1) && !grows_hi && !grows_lo;
  if (grows_hi) {
    double base = std::max(1.0, r0[best]);
    for (size_t i = best + 1; i < n; ++i)
      if (r0[i] > base * (1.0 + 1e-9)) {
        c.first_violation = ts[i];
        break;
      }
  } else if (grows_lo) {
    double base = std::max(1.0, r1[best]);
    for (size_t i = best + 1; i-- > 0;)
      if (r1[i] > base * (1.0 + 1e-9)) {
        c.first_violation = ts[i];
        break;
      }
  }
  return c;
}

IntegralResult bp_check(const YoungFunction& A, double p, double t_max) {
  if (!(p > 1.0)) throw std::invalid_argument("B_p check needs p > 1");
  double U = std::log(t_max);
  // stop before A(e^u) overflows
  double u_cap = 0.0;
  while (u_cap < U && std::isfinite(A(std::exp(u_cap + 1.0))) && A(std::exp(u_cap + 1.0)) < 1e300) u_cap += 1.0;
  U = std::min(U, u_cap);
  auto G = [&](double u) { return A(std::exp(u)) * std::exp(-p * u); };
  IntegralResult r;
  r.value = gk(G, 0.0, U);
  double g1 = G(U - 1.0), g2 = G(U);
  double kappa = g2 > 0.0 ? std::log(g1 / g2) : std::numeric_limits<double>::infinity();
  if (g2 == 0.0) {
    r.tail = 0.0;
  } else if (kappa > 1e-3) {
    r.tail = g2 / kappa;
  } else {
    r.tail = std::numeric_limits<double>::infinity();
  }
  r.converged = r.tail < 1e-6 * r.value;
  return r;
}

IntegralResult kappa_phi(const YoungFunction& A, const YoungFunction& phi, KappaVariant variant) {
  const bool iter = variant.iterated && variant.h < variant.m;
  if (variant.iterated && (variant.h < 0 || variant.h > variant.m)) throw std::invalid_argument("need 0 <= h <= m");
  const int d = variant.m - variant.h;
  const YoungFunction Phi = YoungFunction::phi(d);
  // integrand times t, as a function of u = log t
  auto G = [&](double u) -> double {
    double t = std::exp(u);
    double L = u > 30.0 ? u + std::log1p(kE * std::exp(-u)) : std::log(kE + t);
    // split into two bounded ratios; the plain product overflows near t = 1e300
    if (!iter) return (phi.inverse(t) / t) * (A(L * L) / (L * L * L));
    double inner = Phi.inverse(t);
    return (phi.inverse(inner) / t) * (A(std::pow(L, 4.0 * d)) / std::pow(L, 3.0 * d + 1.0));
  };
  const double vmax = std::log(690.0);
  IntegralResult head;
  head.value = gk(G, 0.0, 1.0);
  auto H = [&](double v) {
    double u = std::exp(v);
    return G(u) * u;
  };
  IntegralResult r = loglog_integral(H, vmax);
  r.value += head.value;
  return r;
}

KrA krA_constant(const YoungFunction& A, double r, double t_max) {
  if (!(r >= 1.0)) throw std::invalid_argument("K_{r,A} needs r >= 1");
  auto ts = log_grid(1.0, t_max, 64);
  KrA k;
  std::vector<double> v(ts.size());
  for (size_t i = 0; i < ts.size(); ++i) {
    v[i] = std::pow(A(ts[i]), 1.0 / r) / ts[i];
    k.value = std::max(k.value, v[i]);
  }
  size_t n = v.size();
  bool growing = n > 65 && v[n - 1] > v[n - 65] * (1.0 + 1e-9) && v[n - 1] >= k.value * (1.0 - 1e-12);
  k.finite = std::isfinite(k.value) && !growing;
  if (!k.finite) k.value = std::numeric_limits<double>::infinity();
  return k;
}

}  // namespace hlab
