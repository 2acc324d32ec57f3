#include <cmath>
#include <stdexcept>

#include "hlab/orlicz.hpp"

namespace hlab {

double luxemburg(std::span<const double> values, std::span<const double> mu, const YoungFunction& A) {
  if (values.empty()) throw std::invalid_argument("Luxemburg norm over an empty set");
  if (!mu.empty() && mu.size() != values.size()) throw std::invalid_argument("measure size mismatch");
  double total = 0.0, mean_abs = 0.0, max_abs = 0.0;
  for (size_t i = 0; i < values.size(); ++i) {
    double m = mu.empty() ? 1.0 : mu[i];
    if (!(m >= 0.0)) throw std::invalid_argument("negative measure in Luxemburg norm");
    double a = std::abs(values[i]);
    total += m;
    mean_abs += a * m;
    if (m > 0.0) max_abs = std::max(max_abs, a);
  }
  if (!(total > 0.0)) throw std::invalid_argument("Luxemburg norm over a null set");
  if (max_abs == 0.0) return 0.0;
  mean_abs /= total;
  if (A.family() == YoungFamily::Power) {
    // c t^r: the modular equation has a closed-form root
    const double r = A.params()[0];
    if (r == 1.0) return A.coefficient() * mean_abs;
    double s = 0.0;
    for (size_t i = 0; i < values.size(); ++i) {
      double m = mu.empty() ? 1.0 : mu[i];
      if (m > 0.0) s += std::pow(std::abs(values[i]) / max_abs, r) * m;
    }
    return max_abs * std::pow(A.coefficient() * s / total, 1.0 / r);
  }

  auto modular = [&](double lambda) {
    double s = 0.0;
    for (size_t i = 0; i < values.size(); ++i) {
      double m = mu.empty() ? 1.0 : mu[i];
      if (m == 0.0) continue;
      s += A(std::abs(values[i]) / lambda) * m;
    }
    return s / total;
  };

  const double a1 = A.inverse(1.0);
  double hi = max_abs / a1;
  double lo = mean_abs / a1;
  if (!(hi > lo * (1.0 + 1e-15))) return hi;  // |f| constant on the support of mu
  double mod_lo = modular(lo);
  while (!(mod_lo > 1.0)) {
    // only reachable for functions that are not convex near zero
    hi = lo;
    lo *= 0.5;
    mod_lo = modular(lo);
    if (lo < 1e-300) throw std::runtime_error("Luxemburg bracket search failed");
  }
  double mod_hi = modular(hi);
  for (int it = 0; it < 200 && hi / lo - 1.0 > 1e-14; ++it) {
    double mid = std::sqrt(lo * hi);
    double m = modular(mid);
    if (m > mod_lo * (1.0 + 1e-12) || m < mod_hi * (1.0 - 1e-12))
      throw std::logic_error("Luxemburg modular is not monotone");
    if (m > 1.0) {
      lo = mid;
      mod_lo = m;
    } else {
      hi = mid;
      mod_hi = m;
    }
  }
  return hi;
}

namespace {

void gather(const GridFunction& f, const Cube& q, const GridFunction* w, std::vector<double>& vals,
            std::vector<double>& mu) {
  if (!cube_in_root(f.grid, q)) throw std::invalid_argument("cube outside the grid root");
  for_each_cell(f.grid, q, [&](int64_t c, double frac) {
    double m = frac;
    if (w) {
      if (!(w->values[c] > 0.0)) throw std::invalid_argument("nonpositive weight cell");
      m *= w->values[c];
    }
    vals.push_back(f.values[c]);
    mu.push_back(m);
  });
}

}  // namespace

double luxemburg_norm(const GridFunction& f, const Cube& q, const YoungFunction& A, const GridFunction* w) {
  std::vector<double> vals, mu;
  gather(f, q, w, vals, mu);
  return luxemburg(vals, mu, A);
}

double luxemburg_norm_box(const GridFunction& f, const Box& cells, const YoungFunction& A, const GridFunction* w) {
  std::vector<double> vals, mu;
  for (int64_t c : box_cell_list(f.grid, cells)) {
    double m = 1.0;
    if (w) {
      if (!(w->values[c] > 0.0)) throw std::invalid_argument("nonpositive weight cell");
      m = w->values[c];
    }
    vals.push_back(f.values[c]);
    mu.push_back(m);
  }
  return luxemburg(vals, mu, A);
}

double cube_average(const GridFunction& f, const Cube& q) {
  double s = 0.0, m = 0.0;
  for_each_cell(f.grid, q, [&](int64_t c, double frac) {
    s += f.values[c] * frac;
    m += frac;
  });
  return s / m;
}

double holder_defect(const GridFunction& f, const GridFunction& g, const YoungFunction& A, const Cube& q,
                     const YoungFunction* Abar) {
  if (!(f.grid == g.grid)) throw std::invalid_argument("holder_defect needs a shared grid");
  double s = 0.0, m = 0.0;
  for_each_cell(f.grid, q, [&](int64_t c, double frac) {
    s += std::abs(f.values[c] * g.values[c]) * frac;
    m += frac;
  });
  if (s == 0.0) return 0.0;
  YoungFunction conj = Abar ? *Abar : complementary(A);
  double nf = luxemburg_norm(f, q, A), ng = luxemburg_norm(g, q, conj);
  return (s / m) / (nf * ng);
}

}  // namespace hlab
