#include "hlab/checks.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "hlab/dyadic.hpp"
#include "hlab/functions.hpp"
#include "hlab/kernel.hpp"
#include "hlab/operators.hpp"
#include "hlab/orlicz.hpp"
#include "hlab/sparse.hpp"
#include "hlab/weights.hpp"

namespace hlab {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

ojson jnum(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

template <class F>
auto config_guard(const std::string& key, F&& fn) -> decltype(fn()) {
  try {
    return fn();
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError("key '" + key + "': " + e.what());
  }
}

YoungFunction young_key(const Scenario& s, const std::string& key, const std::string& def = "") {
  std::string text = def.empty() ? s.str(key) : s.str(key, def);
  return config_guard(key, [&] { return parse_young(text); });
}

GridFunction func_key(const Scenario& s, const Grid& g, const std::string& key, const std::string& def = "") {
  std::string text = def.empty() ? s.str(key) : s.str(key, def);
  return config_guard(key, [&] { return make_function(g, text, s.base_dir); });
}

GridFunction func_text(const Scenario& s, const Grid& g, const std::string& text) {
  return config_guard(text, [&] { return make_function(g, text, s.base_dir); });
}

Kernel kernel_key(const Scenario& s, int dim) {
  return config_guard("kernel", [&] { return make_kernel(s.str("kernel"), dim, s.base_dir); });
}

void echo_entries(const Scenario& s, Report& r) {
  r.name = s.name;
  r.kind = s.kind;
  r.hash = s.hash;
  for (const auto& [k, v] : s.entries) r.echo[k] = v;
  if (s.level_override) r.echo["level_override"] = *s.level_override;
  for (const auto& [k, v] : s.frozen) r.constants["frozen." + k] = v;
}

double mean(const GridFunction& f) {
  return std::accumulate(f.values.begin(), f.values.end(), 0.0) / static_cast<double>(f.size());
}

Cube root_cube(const Grid& g) { return base_cube(g, 0, {0, 0}); }

std::vector<double> log_grid(double lo, double hi, int n) {
  std::vector<double> out(n);
  for (int i = 0; i < n; ++i) out[i] = lo * std::pow(hi / lo, static_cast<double>(i) / (n - 1));
  return out;
}

double spread(const std::vector<double>& v) {
  auto [lo, hi] = std::minmax_element(v.begin(), v.end());
  return *lo > 0.0 ? *hi / *lo : kInf;
}

double modular_integral(const GridFunction& f, double lambda, const YoungFunction& A, const GridFunction& mw) {
  const double vol = f.grid.cell_volume();
  double s = 0.0;
  for (size_t i = 0; i < f.size(); ++i) {
    if (f.values[i] == 0.0) continue;
    s += A(std::abs(f.values[i]) / lambda) * mw.values[i];
  }
  return s * vol;
}

}  // namespace

std::vector<double> lambda_grid(double scale) {
  std::vector<double> out(64);
  for (int i = 0; i < 64; ++i) out[i] = scale * std::pow(10.0, -3.0 + 6.0 * i / 63.0);
  return out;
}

double level_measure(const GridFunction& t, double lambda, const GridFunction* w) {
  double s = 0.0;
  for (size_t i = 0; i < t.size(); ++i)
    if (std::abs(t.values[i]) > lambda) s += w ? w->values[i] : 1.0;
  return s * t.grid.cell_volume();
}

double weak_type_sup(const GridFunction& t, const GridFunction& w, double p) {
  std::vector<size_t> idx(t.size());
  std::iota(idx.begin(), idx.end(), size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](size_t a, size_t b) { return std::abs(t.values[a]) > std::abs(t.values[b]); });
  const double vol = t.grid.cell_volume();
  double best = 0.0, acc = 0.0;
  size_t i = 0;
  while (i < idx.size()) {
    const double v = std::abs(t.values[idx[i]]);
    if (v == 0.0) break;
    // ties enter together
    while (i < idx.size() && std::abs(t.values[idx[i]]) == v) acc += w.values[idx[i++]] * vol;
    best = std::max(best, std::pow(v, p) * acc);
  }
  return best;
}

LineFit fit_line(std::span<const double> x, std::span<const double> y) {
  LineFit f;
  f.points = static_cast<int>(x.size());
  if (x.size() < 2) return f;
  const double n = static_cast<double>(x.size());
  double mx = 0, my = 0;
  for (size_t i = 0; i < x.size(); ++i) mx += x[i], my += y[i];
  mx /= n, my /= n;
  double sxx = 0, sxy = 0;
  for (size_t i = 0; i < x.size(); ++i) sxx += (x[i] - mx) * (x[i] - mx), sxy += (x[i] - mx) * (y[i] - my);
  f.slope = sxx > 0 ? sxy / sxx : 0.0;
  f.intercept = my - f.slope * mx;
  double ss = 0, lo = y[0], hi = y[0];
  for (size_t i = 0; i < x.size(); ++i) {
    double e = y[i] - (f.intercept + f.slope * x[i]);
    ss += e * e;
    lo = std::min(lo, y[i]);
    hi = std::max(hi, y[i]);
  }
  f.rms = std::sqrt(ss / n);
  f.range = hi - lo;
  return f;
}

double submultiplicative_ratio(const YoungFunction& A) {
  auto xs = log_grid(1e-3, 1e3, 25);
  double worst = 0.0;
  for (double x : xs)
    for (double y : xs) {
      double d = A(x) * A(y);
      if (d > 0.0) worst = std::max(worst, A(x * y) / d);
    }
  return worst;
}

double conjugate_inverse(const YoungFunction& B, double t) {
  if (B.family() == YoungFamily::Power && B.params()[0] == 1.0) return B.coefficient();
  return complementary(B).inverse(t);
}

double cf_condition_sup(const YoungFunction& A, const YoungFunction& B, int m, double t0) {
  std::optional<YoungFunction> bbar;
  const bool linear = B.family() == YoungFamily::Power && B.params()[0] == 1.0;
  if (!linear) bbar = complementary(B);
  double worst = 0.0;
  for (double t : log_grid(t0, 1e6, 64)) {
    double bi = linear ? B.coefficient() : bbar->inverse(t);
    worst = std::max(worst, A.inverse(t) * bi * std::pow(std::log1p(t), m) / t);
  }
  return worst;
}

// ---------------------------------------------------------------- strong / cf

Report strong_cf_check(const Scenario& s) {
  Report rep;
  echo_entries(s, rep);
  const bool cf = s.kind == "cf";
  const int m = s.integer("m", 0);
  const double p = s.num("p", 2.0);
  if (m < 0 || m > 4) throw ConfigError("m must lie in [0, 4]");
  if (!(p >= 1.0)) throw ConfigError("p must satisfy 1 <= p");
  const auto levels = s.levels({8, 10, 12});

  double r = 1.0, K = 1.0;
  std::optional<YoungFunction> A, B;
  if (!cf) {
    r = s.num("r", 1.0);
    if (!(r >= 1.0 && r < p)) throw ConfigError("strong estimate needs 1 <= r < p");
    A = young_key(s, "A", "power(1)");
    KrA k = krA_constant(*A, r);
    if (!k.finite)
      throw ConfigError("K_{r,A} is infinite: the hypothesis sup_t A(t)^{1/r}/t < infinity fails for A = " +
                        A->to_string());
    K = k.value;
    rep.constants["K_rA"] = K;
  } else {
    B = young_key(s, "B", "power(1)");
    if (m > 0) {
      A = young_key(s, "A");
      double c = config_guard("A", [&] { return cf_condition_sup(*A, *B, m); });
      rep.constants["cf_condition_sup"] = c;
      rep.check("A^{-1} Bbar^{-1} Cbar^{-1}(t) / t on [1,1e6]", c, "<=", 1.0 + 1e-12);
    }
  }
  std::optional<YoungFunction> C;
  if (!cf && s.has("C")) {
    C = young_key(s, "C");
    YoungFunction bA = young_key(s, "bump_A");
    YoungFunction bB = young_key(s, "bump_B", "power(1)");
    IntegralResult bp = bp_check(bA, p);
    rep.constants["bump_A_Bp_integral"] = jnum(bp.value);
    rep.check("bump_A in B_p (integral converges)", bp.converged ? 1.0 : 0.0, "==", 1.0);
    // A^{-1} Bbar^{-1} C^{-1} Dbar_m^{-1} <= c t for t >= t0, D_m(t) = e^{t^{1/m}} - 1.
    // Also tabulated with D_m^{-1} = log(1+t)^m in place of Dbar_m^{-1}.
    std::optional<YoungFunction> dbar;
    if (m > 0) dbar = complementary(YoungFunction::expl(1.0 / m));
    const auto ts = log_grid(s.num("bump_t0", 10.0), 1e6, 64);
    std::vector<double> stated, dinv;
    for (double t : ts) {
      const double base = bA.inverse(t) * conjugate_inverse(bB, t) * C->inverse(t) / t;
      stated.push_back(base * (dbar ? dbar->inverse(t) : 1.0));
      dinv.push_back(base * std::pow(std::log1p(t), m));
    }
    auto report_sup = [&](const std::string& key, const std::vector<double>& v) {
      const double sup = *std::max_element(v.begin(), v.end());
      const bool grows = v.back() >= sup * (1.0 - 1e-12) && v.back() > v[v.size() - 9] * (1.0 + 1e-6);
      rep.constants[key] = sup;
      rep.constants[key + "_growing_at_end"] = grows;
      rep.verdicts.push_back(key + " = " + fmt_double(sup) + " on [t0, 1e6]" +
                             (grows ? ", still increasing at the right end (not bounded on the grid)" : ", bounded"));
    };
    report_sup("bump_condition_sup", stated);
    report_sup("bump_condition_sup_Dinv", dinv);
  }

  std::vector<double> ratios, bump_ratios;
  for (int L : levels) {
    const Grid g = s.grid(L);
    DiscreteOperator op(kernel_key(s, g.dim), g);
    GridFunction f = func_key(s, g, "f");
    GridFunction b = func_key(s, g, "symbol", "const(0)");
    GridFunction w = func_key(s, g, "w", "const(1)");
    for (double v : w.values)
      if (!(v > 0.0)) throw ConfigError("weight must be positive on every cell");
    const double c = mean(b);
    GridFunction t = commutator_apply(op, b, m, f, c);
    const double lhs = lp_norm(t, p, &w);
    const double bmo = m > 0 ? bmo_norm(b) : 1.0;
    const double wi = weight_constant(w, WeightSpec::ainf());
    ojson row;
    row["level"] = L;
    row["lhs"] = lhs;
    row["bmo"] = bmo;
    row["w_ainf"] = wi;
    double rhs = 0.0;
    if (!cf) {
      const double s_ = p / r;
      const double wq = weight_constant(w, WeightSpec::ap(s_));
      GridFunction sigma = dual_weight(w, s_);
      const double si = weight_constant(sigma, WeightSpec::ainf());
      const double nf = lp_norm(f, p, &w);
      const double pp = p > 1.0 ? p / (p - 1.0) : kInf;
      const double wi_term = std::isfinite(pp) ? std::pow(wi, 1.0 / pp) : 1.0;
      rhs = std::pow(bmo, m) * K * std::pow(wq, 1.0 / p) * (wi_term + std::pow(si, 1.0 / p)) *
            std::pow(wi + si, m) * nf;
      row["w_ap_over_r"] = wq;
      row["sigma_ainf"] = si;
      row["f_norm"] = nf;
      if (C) {
        const double cb = weight_constant(w, WeightSpec::bump(p, *C));
        const double wap = weight_constant(w, WeightSpec::ap(p));
        const double brhs =
            std::pow(bmo, m) * std::pow(wi, m) * std::pow(cb, 1.0 / p) * std::pow(wap, 1.0 / pp) * nf;
        row["w_ap_C"] = cb;
        row["w_ap"] = wap;
        row["bump_rhs"] = brhs;
        row["bump_ratio"] = lhs / brhs;
        bump_ratios.push_back(lhs / brhs);
      }
    } else {
      YoungFunction mA = m == 0 ? *B : *A;
      GridFunction mf = maximal(f, MaximalVariant::orlicz(mA));
      const double nm = lp_norm(mf, p, &w);
      rhs = std::pow(bmo, m) * std::pow(wi, m + 1) * nm;
      row["maximal_norm"] = nm;
    }
    const double ratio = lhs / rhs;
    row["rhs"] = rhs;
    row["ratio"] = ratio;
    ratios.push_back(ratio);

    // homogeneity: T(2f) against the doubled right side
    GridFunction f2 = 2.0 * f;
    const double lhs2 = lp_norm(commutator_apply(op, b, m, f2, c), p, &w);
    const double drift = std::abs((lhs2 / (2.0 * rhs)) / ratio - 1.0);
    row["scaling_drift"] = drift;
    rep.check("L" + std::to_string(L) + " scaling drift of ratio under f -> 2f", drift, "<=", 1e-12);
    rep.check("L" + std::to_string(L) + " ratio", ratio, "<=", s.frozen_value("ratio_max"));
    if (!bump_ratios.empty() && C)
      rep.check("L" + std::to_string(L) + " bump ratio", bump_ratios.back(), "<=", s.frozen_value("bump_ratio_max"));
    rep.rows.push_back(std::move(row));
  }
  rep.constants["ratio_spread"] = spread(ratios);
  rep.check("ratio spread across levels", spread(ratios), "<=", s.frozen_value("spread_max"));
  return rep;
}

// ---------------------------------------------------------------- endpoint

namespace {

struct EndpointTerm {
  YoungFunction A;
  YoungFunction mw_young;  // Phi_{m-h} o phi_h
  double kappa = 0.0;
  bool converged = true;
};

std::vector<double> endpoint_rhs(const GridFunction& f, const std::vector<EndpointTerm>& terms,
                                 const std::vector<GridFunction>& mws, const std::vector<double>& lambdas) {
  std::vector<double> out;
  for (double lam : lambdas) {
    double rhs = 0.0;
    for (size_t h = 0; h < terms.size(); ++h) {
      if (!terms[h].converged) {
        rhs = kInf;
        break;
      }
      rhs += terms[h].kappa * modular_integral(f, lam, terms[h].A, mws[h]);
    }
    out.push_back(rhs);
  }
  return out;
}

}  // namespace

Report endpoint_check(const Scenario& s) {
  Report rep;
  echo_entries(s, rep);
  const bool czo = s.kind == "endpoint_czo";
  const int m = s.integer("m", 0);
  if (m < 0 || m > 4) throw ConfigError("m must lie in [0, 4]");
  const auto levels = s.levels({10});
  std::vector<double> eps_list{1.0};
  if (czo) {
    eps_list.clear();
    for (const auto& e : s.list("eps")) eps_list.push_back(config_guard("eps", [&] { return std::stod(e); }));
    for (double e : eps_list)
      if (!(e > 0.0)) throw ConfigError("eps must be positive");
  }

  // terms per eps
  std::vector<std::vector<EndpointTerm>> term_sets;
  for (double eps : eps_list) {
    std::vector<EndpointTerm> terms;
    for (int h = 0; h <= m; ++h) {
      YoungFunction Ah = YoungFunction::phi(h);
      YoungFunction ph = YoungFunction::phi(0);
      if (czo) {
        const int l = h == 0 ? 0 : (h < m ? 1 : m);
        ph = YoungFunction::lll(l, 1.0 + eps);
      } else {
        const std::string hk = std::to_string(h);
        Ah = s.has("A" + hk) ? young_key(s, "A" + hk) : young_key(s, "A", "power(1)");
        ph = s.has("phi" + hk) ? young_key(s, "phi" + hk) : young_key(s, "phi");
      }
      const double sub = submultiplicative_ratio(Ah);
      if (sub > 1.0 + 1e-9)
        throw ConfigError("A_" + std::to_string(h) + " = " + Ah.to_string() +
                          " is not submultiplicative: A(xy) <= A(x)A(y) fails by factor " + fmt_double(sub));
      IntegralResult k = kappa_phi(Ah, ph, {m > 0, m, h});
      YoungFunction mwy = m - h == 0 ? ph : YoungFunction::compose(YoungFunction::phi(m - h), ph);
      terms.push_back({Ah, mwy, k.value, k.converged});
      const std::string tag = (czo ? "eps=" + fmt_double(eps) + " " : "") + "h=" + std::to_string(h);
      rep.constants["kappa " + tag] = jnum(k.converged ? k.value : kInf);
      rep.constants["phi " + tag] = ph.to_string();
      rep.constants["maximal " + tag] = mwy.to_string();
      if (!k.converged) rep.verdicts.push_back("kappa diverges for " + tag + ": scenario is vacuous (RHS = inf)");
    }
    term_sets.push_back(std::move(terms));
  }
  if (czo) {
    for (int h = 0; h <= m; ++h) {
      double worst = 0.0;
      for (size_t e = 0; e < eps_list.size(); ++e)
        worst = std::max(worst, eps_list[e] * (term_sets[e][h].converged ? term_sets[e][h].kappa : kInf));
      rep.constants["max eps*kappa h=" + std::to_string(h)] = jnum(worst);
      rep.check("eps * kappa_phi_h bounded, h=" + std::to_string(h), worst, "<=", s.frozen_value("eps_kappa_max"));
    }
  }

  for (int L : levels) {
    const Grid g = s.grid(L);
    DiscreteOperator op(kernel_key(s, g.dim), g);
    GridFunction f = func_key(s, g, "f");
    GridFunction b = func_key(s, g, "symbol", "const(0)");
    GridFunction w = func_key(s, g, "w", "const(1)");
    GridFunction t = commutator_apply(op, b, m, f, mean(b));
    const double scale = t.max_abs() > 0.0 ? t.max_abs() : 1.0;
    const auto lams = lambda_grid(scale);
    std::vector<double> lhs;
    for (double lam : lams) lhs.push_back(level_measure(t, lam, &w));
    const std::string Ls = "L" + std::to_string(L);

    for (size_t e = 0; e < eps_list.size(); ++e) {
      const auto& terms = term_sets[e];
      bool vacuous = false;
      std::vector<GridFunction> mws;
      for (const auto& tm : terms) {
        vacuous = vacuous || !tm.converged;
        mws.push_back(maximal(w, MaximalVariant::orlicz(tm.mw_young)));
      }
      auto rhs = endpoint_rhs(f, terms, mws, lams);
      double worst = 0.0;
      for (size_t i = 0; i < lams.size(); ++i) {
        double ratio = lhs[i] == 0.0 ? 0.0 : (rhs[i] > 0.0 ? lhs[i] / rhs[i] : kInf);
        worst = std::max(worst, ratio);
        if (e == 0 && L == levels.back()) rep.plot.push_back({lams[i], lhs[i], rhs[i], ratio});
      }
      const std::string tag = Ls + (czo ? " eps=" + fmt_double(eps_list[e]) : "");
      ojson row;
      row["level"] = L;
      if (czo) row["eps"] = eps_list[e];
      row["scale"] = scale;
      row["max_ratio"] = jnum(worst);
      row["vacuous"] = vacuous;
      if (vacuous) {
        rep.verdicts.push_back(tag + ": vacuous, not asserted");
      } else {
        rep.check(tag + " max over lambda of LHS / (kappa-sum RHS)", worst, "<=", s.frozen_value("ratio_max"));
      }

      if (czo) {
        const double eps = eps_list[e];
        YoungFunction Pm = YoungFunction::phi(m);
        GridFunction m_lll = maximal(w, MaximalVariant::orlicz(YoungFunction::lll(m, 1.0 + eps)));
        GridFunction m_log = maximal(w, MaximalVariant::orlicz(YoungFunction::llogl(m + eps)));
        double worst_final = 0.0;
        for (size_t i = 0; i < lams.size(); ++i) {
          double rf = modular_integral(f, lams[i], Pm, m_lll) / eps;
          double ratio = lhs[i] == 0.0 ? 0.0 : (rf > 0.0 ? lhs[i] / rf : kInf);
          worst_final = std::max(worst_final, ratio);
        }
        row["max_ratio_final"] = jnum(worst_final);
        rep.check(tag + " max over lambda of LHS / ((1/eps) int Phi_m M_{L(logL)^m(loglogL)^{1+eps}} w)",
                  worst_final, "<=", s.frozen_value("ratio_final_max"));

        // ||.||_A <= K ||.||_B with K = sup A/B over the range reachable on this grid
        YoungFunction Ay = YoungFunction::lll(m, 1.0 + eps), By = YoungFunction::llogl(m + eps);
        const double smax = By.inverse(std::pow(3.0, g.dim) * static_cast<double>(g.cell_count()));
        double c_eps = 1.0;
        for (double x : log_grid(1e-9, smax, 400)) c_eps = std::max(c_eps, Ay(x) / By(x));
        double pw = 0.0;
        for (size_t i = 0; i < w.size(); ++i) pw = std::max(pw, m_lll.values[i] / m_log.values[i]);
        row["c_eps"] = c_eps;
        row["pointwise_max"] = pw;
        rep.check(tag + " M_{L(logL)^m(loglogL)^{1+eps}} w <= c_eps M_{L(logL)^{m+eps}} w", pw, "<=",
                  c_eps * (1.0 + 1e-9));

        // eps times the kappa-sum RHS at the middle of the grid
        const double mid = lams[lams.size() / 2];
        auto r_mid = endpoint_rhs(f, terms, mws, {mid});
        row["eps_rhs_mid"] = jnum(eps * r_mid[0]);
      }
      rep.rows.push_back(std::move(row));
    }
    if (f.max_abs() == 0.0) {
      double l = *std::max_element(lhs.begin(), lhs.end());
      rep.check(Ls + " f = 0 gives empty level sets", l, "==", 0.0);
    }
  }
  if (czo) {
    // eps * RHS stays bounded as eps decreases
    double hi = 0.0, lo = kInf;
    for (const auto& row : rep.rows)
      if (row["eps_rhs_mid"].is_number()) {
        hi = std::max(hi, row["eps_rhs_mid"].get<double>());
        lo = std::min(lo, row["eps_rhs_mid"].get<double>());
      }
    rep.constants["eps_rhs_spread"] = jnum(lo > 0 ? hi / lo : kInf);
    rep.check("eps * RHS spread over eps", lo > 0 ? hi / lo : kInf, "<=", s.frozen_value("eps_rhs_spread_max"));
  }
  return rep;
}

// ---------------------------------------------------------------- expdecay

Report expdecay_check(const Scenario& s) {
  Report rep;
  echo_entries(s, rep);
  const int m = s.integer("m", 0);
  if (m < 0 || m > 4) throw ConfigError("m must lie in [0, 4]");
  const auto levels = s.levels({10});
  const YoungFunction B = young_key(s, "B", "power(1)");
  YoungFunction MA = B;
  if (m > 0) {
    MA = young_key(s, "A");
    double c = config_guard("A", [&] { return cf_condition_sup(MA, B, m); });
    rep.constants["condition_sup"] = c;
    rep.check("A^{-1} Bbar^{-1} Cbar^{-1}(t) / t on [1,1e6]", c, "<=", 1.0 + 1e-12);
  }
  const double residual_max = 0.10;
  const double margin = s.frozen_value("envelope_margin");
  const double count_margin = s.frozen_value("count_margin");

  for (int L : levels) {
    const Grid g = s.grid(L);
    const std::string Ls = "L" + std::to_string(L);
    DiscreteOperator op(kernel_key(s, g.dim), g);
    const Cube q = s.has("cube") ? config_guard("cube", [&] { return parse_cube_literal(g, s.str("cube")); })
                                 : root_cube(g);
    if (q.lattice != 0) throw ConfigError("cube must belong to the base lattice");
    GridFunction f = func_key(s, g, "f");
    const Box qc = cube_cells(g, q);
    const auto qcells = box_cell_list(g, qc);
    {
      GridFunction clipped(g, 0.0);
      for (int64_t c : qcells) clipped.values[c] = f.values[c];
      f = std::move(clipped);
    }
    GridFunction b = func_key(s, g, "symbol", "const(0)");
    GridFunction t = commutator_apply(op, b, m, f, mean(b));
    GridFunction mf = maximal(f, MaximalVariant::orlicz(MA));
    const double tol = 1e-12 * std::max(1.0, t.max_abs());
    int64_t degenerate = 0;
    GridFunction ratio(g, 0.0);
    for (int64_t c : qcells) {
      double a = std::abs(t.values[c]);
      if (mf.values[c] > 0.0) ratio.values[c] = a / mf.values[c];
      else if (a > tol) ++degenerate;
    }
    rep.check(Ls + " degenerate cells (M f = 0 where T f != 0)", static_cast<double>(degenerate), "==", 0.0);

    const double nq = static_cast<double>(qcells.size());
    const double scale = ratio.max_abs() > 0 ? ratio.max_abs() : 1.0;
    const auto lams = lambda_grid(scale);
    std::vector<double> meas, xs, ys;
    for (double lam : lams) {
      int64_t k = 0;
      for (int64_t c : qcells) k += ratio.values[c] > lam;
      double mu = static_cast<double>(k) / nq;
      meas.push_back(mu);
      if (mu > 0.0) {
        xs.push_back(std::pow(lam, 1.0 / (m + 1)));
        ys.push_back(std::log(mu));
      }
    }
    LineFit fit = fit_line(xs, ys);
    const double rel = fit.range > 0 ? fit.rms / fit.range : kInf;
    ojson row;
    row["level"] = L;
    row["scale"] = scale;
    row["slope"] = fit.slope;
    row["intercept"] = fit.intercept;
    row["rms_residual"] = fit.rms;
    row["log_range"] = fit.range;
    row["fit_points"] = fit.points;
    rep.check(Ls + " fitted slope of log measure vs lambda^{1/(m+1)}", fit.slope, "<", 0.0);
    rep.check(Ls + " residual / range", rel, "<", residual_max);
    double over = -kInf;
    for (size_t i = 0; i < lams.size(); ++i) {
      const double x = std::pow(lams[i], 1.0 / (m + 1));
      const double env = std::exp(fit.intercept + fit.slope * x + margin);
      if (L == levels.back()) rep.plot.push_back({lams[i], meas[i], env, meas[i] / env});
      if (lams[i] >= 1.0 && meas[i] > 0.0) over = std::max(over, std::log(meas[i]) - (fit.intercept + fit.slope * x));
    }
    row["max_excess_over_fit"] = jnum(over);
    rep.check(Ls + " profile under fitted envelope for lambda >= 1 (log excess)", over, "<=", margin);

    // counting function of an engine family
    GridFunction ff = s.has("family_f") ? func_key(s, g, "family_f") : f;
    EngineOptions opt;
    opt.hormander.seed = s.seed;
    SparseForm form = build_sparse_family(op, b, m, B, ff, q, opt);
    GridFunction cnt = counting_function(form);
    double nmax = 0.0;
    for (int64_t c : qcells) nmax = std::max(nmax, cnt.values[c]);
    std::vector<double> ts, ls;
    for (int k = 0; k < static_cast<int>(nmax); ++k) {
      int64_t n = 0;
      for (int64_t c : qcells) n += cnt.values[c] > k;
      ts.push_back(k);
      ls.push_back(std::log(static_cast<double>(n) / nq));
    }
    row["family_size"] = form.family.cubes.size();
    row["count_max"] = nmax;
    if (ts.size() < 2) {
      // one layer: |{N > t}| <= e^{-t}|Q| holds for every t
      rep.verdicts.push_back(Ls + ": single-layer family, counting bound holds with c = 1");
    } else {
      LineFit cf = fit_line(ts, ls);
      double cover = -kInf;
      for (size_t i = 0; i < ts.size(); ++i) cover = std::max(cover, ls[i] - (cf.intercept + cf.slope * ts[i]));
      row["count_c"] = std::exp(cf.intercept);
      row["count_alpha"] = -cf.slope;
      row["count_max_excess"] = jnum(cover);
      rep.check(Ls + " counting-function decay slope", cf.slope, "<", 0.0);
      rep.check(Ls + " counting profile under c e^{-alpha t} (log excess)", cover, "<=", count_margin);
    }
    rep.rows.push_back(std::move(row));
  }
  return rep;
}

// ---------------------------------------------------------------- counterexample

Report counterexample_probe(const Scenario& s) {
  Report rep;
  echo_entries(s, rep);
  const double r = s.num("r"), p = s.num("p"), gamma = s.num("gamma"), beta = s.num("beta", 1.0);
  const double eta = s.num("eta", 4.0);
  if (!(r > 1.0)) throw ConfigError("r must satisfy r > 1");
  const double rp = r / (r - 1.0);
  if (!(p >= 1.0 && p < rp)) throw ConfigError("parameter domain: 1 <= p < r' fails (r' = " + fmt_double(rp) + ")");
  if (!(p / rp < gamma && gamma < 1.0))
    throw ConfigError("parameter domain: p/r' < gamma < 1 fails (p/r' = " + fmt_double(p / rp) + ")");
  if (!(beta > 0.0)) throw ConfigError("beta must be positive");
  if (s.integer("dim", 1) != 1) throw ConfigError("the counterexample probe runs in one dimension");
  const double gamma1 = 1.0 - p / (2.0 * rp);
  rep.constants["gamma1"] = gamma1;
  rep.constants["r_prime"] = rp;
  const auto levels = s.levels({8, 10, 12});

  std::vector<double> S, Sgrid, control;
  for (int L : levels) {
    const Grid g = s.grid(L);
    if (g.origin[0] > -6.0 || g.origin[0] + g.side < 6.0) throw ConfigError("grid must cover |x| <= 6");
    DiscreteOperator op(Kernel::counterexample(r, beta, eta), g);
    const std::string fl = "ball_power(" + fmt_double(-gamma1 / p) + ",1," + fmt_double(-eta) + ")";
    GridFunction f = func_text(s, g, fl);
    GridFunction w = func_text(s, g, "power_abs(" + fmt_double(-gamma) + ")");
    // the singular cells touching the origin are dropped
    for (size_t i = 0; i < w.size(); ++i) {
      auto lo = g.lower(static_cast<int64_t>(i));
      if (lo[0] <= 0.0 && lo[0] + g.cell_side() >= 0.0) w.values[i] = 0.0;
    }
    GridFunction t = op.apply(f);
    const double sup = weak_type_sup(t, w, p);
    double sg = 0.0;
    const auto lams = lambda_grid(t.max_abs());
    std::vector<PlotRow> plot;
    double ctrl = 0.0;
    for (size_t i = 0; i < f.size(); ++i) ctrl += std::abs(f.values[i]) * w.values[i];
    ctrl *= g.cell_volume();
    for (double lam : lams) {
      double v = std::pow(lam, p) * level_measure(t, lam, &w);
      sg = std::max(sg, v);
      plot.push_back({lam, v, ctrl, v / ctrl});
    }
    if (L == levels.back()) rep.plot = plot;
    S.push_back(sup);
    Sgrid.push_back(sg);
    control.push_back(ctrl);
    ojson row;
    row["level"] = L;
    row["S"] = sup;
    row["S_lambda_grid"] = sg;
    row["control"] = ctrl;
    row["Tf_max"] = t.max_abs();
    rep.rows.push_back(std::move(row));
    rep.check("L" + std::to_string(L) + " control finite", std::isfinite(ctrl) ? 1.0 : 0.0, "==", 1.0);
  }
  for (size_t i = 1; i < S.size(); ++i)
    rep.check("S(L" + std::to_string(levels[i]) + ") / S(L" + std::to_string(levels[i - 1]) + ")", S[i] / S[i - 1],
              ">", 1.0);
  const double growth = S.back() / S.front();
  rep.constants["S_growth"] = growth;
  rep.check("S(L_max) / S(L_min)", growth, ">=", 4.0);
  rep.constants["control_spread"] = spread(control);
  rep.check("control spread across levels", spread(control), "<=", 1.1);
  rep.verdicts.push_back(growth >= 4.0 ? "divergence observed across levels" : "no divergence observed across levels");
  return rep;
}

// ---------------------------------------------------------------- sparse

Report sparse_check(const Scenario& s) {
  Report rep;
  echo_entries(s, rep);
  const auto levels = s.levels({8, 10, 12});
  const int nominal = s.integer("nominal_level", levels.size() == 1 ? levels[0] : 10);
  if (std::find(levels.begin(), levels.end(), nominal) == levels.end())
    throw ConfigError("nominal_level must be one of the levels");
  const auto ms = s.ints("m", {0});
  const auto fs = s.list("f");
  const double tol = s.num("cstar_tolerance", 0.25);
  for (int m : ms)
    if (m < 0 || m > 4) throw ConfigError("m must lie in [0, 4]");

  // c_star[m][f][level]
  std::vector<std::vector<std::vector<double>>> cstar(ms.size(), std::vector<std::vector<double>>(fs.size()));
  for (int L : levels) {
    const Grid g = s.grid(L);
    Kernel k = kernel_key(s, g.dim);
    const std::string atext = s.str("A", "power(1)");
    YoungFunction A = atext == "matching" ? config_guard("A", [&] { return complementary(k.young()); })
                                          : young_key(s, "A", "power(1)");
    DiscreteOperator op(k, g);
    EngineOptions opt;
    opt.hormander.seed = s.seed;
    OperatorConstants oc = operator_constants(op, A, opt);
    opt.c_t = oc.c_t();
    rep.constants["L" + std::to_string(L) + " hormander"] = oc.hormander;
    rep.constants["L" + std::to_string(L) + " l2_norm"] = oc.l2;
    rep.constants["L" + std::to_string(L) + " c_T"] = oc.c_t();
    GridFunction b = func_key(s, g, "symbol", "const(0)");
    const Cube q0 = root_cube(g);
    for (size_t mi = 0; mi < ms.size(); ++mi)
      for (size_t fi = 0; fi < fs.size(); ++fi) {
        GridFunction f = func_text(s, g, fs[fi]);
        DominationReport dr = domination_report(op, b, ms[mi], A, f, q0, opt);
        const std::string tag = "L" + std::to_string(L) + " m=" + std::to_string(ms[mi]) + " f=" + fs[fi];
        ojson row;
        row["level"] = L;
        row["m"] = ms[mi];
        row["f"] = fs[fi];
        row["c_star"] = dr.c_star;
        row["violations"] = dr.violations;
        row["family_size"] = dr.form.family.cubes.size();
        row["partial"] = dr.form.partial;
        row["sparse_ok"] = dr.sparse_ok;
        row["histogram"] = dr.histogram;
        rep.rows.push_back(std::move(row));
        rep.check(tag + " violations", static_cast<double>(dr.violations), "==", 0.0);
        rep.check(tag + " family is 1/2-sparse", dr.sparse_ok ? 1.0 : 0.0, "==", 1.0);
        rep.check(tag + " C*", dr.c_star, "<=", s.frozen_value("cstar_max"));
        if (!dr.sparse_ok) rep.verdicts.push_back(tag + ": " + dr.sparse_diagnostic);
        cstar[mi][fi].push_back(dr.c_star);
        if (!rep.family && L == nominal) rep.family = family_json(dr.form, true);
      }
  }
  const size_t ni = static_cast<size_t>(std::find(levels.begin(), levels.end(), nominal) - levels.begin());
  for (size_t mi = 0; mi < ms.size(); ++mi)
    for (size_t fi = 0; fi < fs.size(); ++fi) {
      const double ref = cstar[mi][fi][ni];
      for (size_t li = 0; li < levels.size(); ++li) {
        if (li == ni) continue;
        const double dev = ref > 0 ? std::abs(cstar[mi][fi][li] / ref - 1.0) : kInf;
        rep.check("m=" + std::to_string(ms[mi]) + " f=" + fs[fi] + " |C*(L" + std::to_string(levels[li]) + ")/C*(L" +
                      std::to_string(nominal) + ") - 1|",
                  dev, "<=", tol);
      }
    }
  return rep;
}

// ---------------------------------------------------------------- constants

Report constants_dump(const Scenario& s) {
  Report rep;
  echo_entries(s, rep);
  const int L = s.levels({10}).back();
  const Grid g = s.grid(L);
  const double p = s.num("p", 2.0), r = s.num("r", 2.0);
  auto row = [&](const std::string& obj, const std::string& what, double v) {
    rep.constants_csv.push_back({obj, what, fmt_double(v)});
    rep.constants[obj + " " + what] = jnum(v);
  };
  rep.constants_csv.push_back({"battery", "scenario_hash", std::to_string(s.hash)});

  if (s.has("weights"))
    for (const auto& lit : s.list("weights")) {
      GridFunction w = func_text(s, g, lit);
      const double ap = weight_constant(w, WeightSpec::ap(p));
      const double a1 = weight_constant(w, WeightSpec::a1());
      const double ai = weight_constant(w, WeightSpec::ainf());
      row(lit, "A_" + fmt_double(p), ap);
      row(lit, "A_1", a1);
      row(lit, "A_inf", ai);
      if (s.has("C")) row(lit, "A_" + fmt_double(p) + "(" + s.str("C") + ")", weight_constant(w, WeightSpec::bump(p, young_key(s, "C"))));
      if (lit.rfind("const(", 0) == 0) {
        rep.check(lit + " [w]_Ap", ap, "==", 1.0);
        rep.check(lit + " [w]_A1", a1, "==", 1.0);
        rep.check(lit + " [w]_Ainf", ai, "==", 1.0);
      }
    }
  if (s.has("young"))
    for (const auto& y : s.list("young")) {
      YoungFunction A = config_guard("young", [&] { return parse_young(y); });
      KrA k = krA_constant(A, r);
      row(y, "K_{" + fmt_double(r) + ",A}", k.finite ? k.value : kInf);
      IntegralResult bp = bp_check(A, p);
      row(y, "B_" + fmt_double(p) + " integral", bp.converged ? bp.value : kInf);
      if (A.family() == YoungFamily::Power && A.params()[0] == r && A.coefficient() == 1.0)
        rep.check(y + " K_{r,A}", k.value, "==", 1.0);
    }
  if (s.has("symbols"))
    for (const auto& lit : s.list("symbols")) row(lit, "BMO", bmo_norm(func_text(s, g, lit)));
  if (s.has("kernels"))
    for (const auto& spec : s.list("kernels")) {
      Kernel k = config_guard("kernels", [&] { return make_kernel(spec, g.dim, s.base_dir); });
      DiscreteOperator op(k, g);
      HormanderOptions ho;
      ho.seed = s.seed;
      row(spec, "H_inf estimate", hormander_estimate(op, nullptr, ho).value);
      row(spec, "L2 norm estimate", l2_norm_estimate(op));
    }
  if (s.has("phi")) {
    YoungFunction A = young_key(s, "kappa_A", "power(1)");
    for (const auto& ph : s.list("phi")) {
      IntegralResult k = kappa_phi(A, config_guard("phi", [&] { return parse_young(ph); }));
      row(ph, "kappa_phi with A=" + A.to_string(), k.converged ? k.value : kInf);
    }
  }
  return rep;
}

Report run_scenario(const Scenario& s) {
  if (s.kind == "strong" || s.kind == "cf") return strong_cf_check(s);
  if (s.kind == "endpoint" || s.kind == "endpoint_czo") return endpoint_check(s);
  if (s.kind == "expdecay") return expdecay_check(s);
  if (s.kind == "counterexample") return counterexample_probe(s);
  if (s.kind == "sparse") return sparse_check(s);
  if (s.kind == "constants") return constants_dump(s);
  throw ConfigError("unknown kind '" + s.kind + "'");
}

}  // namespace hlab
