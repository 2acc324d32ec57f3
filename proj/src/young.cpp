#include "hlab/young.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

namespace hlab {

struct YoungFunction::Node {
  YoungFamily family = YoungFamily::Power;
  std::vector<double> params;
  double coef = 1.0;
  std::shared_ptr<const Node> a, b;
  std::vector<double> t, y, slope;
  bool infinite_tail = false;
};

namespace {

constexpr double kE = std::numbers::e;
constexpr double kInf = std::numeric_limits<double>::infinity();

using NodePtr = std::shared_ptr<const YoungFunction::Node>;

double eval_node(const YoungFunction::Node& n, double t);

double eval_table(const YoungFunction::Node& n, double t) {
  const auto& xs = n.t;
  if (t >= xs.back()) {
    if (t == xs.back()) return n.y.back();
    return n.infinite_tail ? kInf : n.y.back() + n.slope.back() * (t - xs.back());
  }
  auto it = std::upper_bound(xs.begin(), xs.end(), t);
  size_t i = static_cast<size_t>(it - xs.begin()) - 1;
  return n.y[i] + n.slope[i] * (t - xs[i]);
}

double eval_node(const YoungFunction::Node& n, double t) {
  const auto& p = n.params;
  double v = 0.0;
  switch (n.family) {
    case YoungFamily::Power: v = std::pow(t, p[0]); break;
    case YoungFamily::LLogL: v = t * std::pow(std::log(kE + t), p[0]); break;
    case YoungFamily::ExpL: v = std::expm1(std::pow(t, p[0])); break;
    case YoungFamily::LLogLLogLogL: {
      double l = std::log(kE + t);
      v = t * std::pow(l, p[0]) * std::pow(std::log(kE + l), p[1]);
      break;
    }
    case YoungFamily::PhiJ: v = t * std::pow(std::log(kE + t), p[0]); break;
    case YoungFamily::Compose: v = eval_node(*n.a, eval_node(*n.b, t)); break;
    case YoungFamily::Product: {
      double x = eval_node(*n.a, t);
      v = x == 0.0 ? 0.0 : x * eval_node(*n.b, t);
      break;
    }
    case YoungFamily::Tabulated: v = eval_table(n, t); break;
  }
  return n.coef * v;
}

std::string fmt_num(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

NodePtr make(YoungFamily f, std::vector<double> params, double coef = 1.0) {
  auto n = std::make_shared<YoungFunction::Node>();
  n->family = f;
  n->params = std::move(params);
  n->coef = coef;
  return n;
}

void require(bool ok, const char* msg) {
  if (!ok) throw std::invalid_argument(msg);
}

// Maximizes s*t - A(s) over s >= 0.
double legendre_point(const YoungFunction& A, double t) {
  auto g = [&](double s) { return s * t - A(s); };
  double s = 1.0;
  double gs = g(s);
  if (g(0.5) > gs) {
    // maximizer below 1: shrink until the function stops improving
    while (s > 1e-300 && g(0.5 * s) > gs) {
      s *= 0.5;
      gs = g(s);
    }
  }
  while (true) {
    double g2 = g(2.0 * s);
    if (!(g2 >= gs)) break;
    s *= 2.0;
    gs = g2;
    if (s > 1e300) throw UnboundedConjugate("complementary function is infinite at t = " + fmt_num(t));
  }
  // concave: maximizer lies in [s/2, 2s]
  double a = 0.5 * s, b = 2.0 * s;
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double gc = g(c), gd = g(d);
  for (int it = 0; it < 200 && (b - a) > 1e-15 * b; ++it) {
    if (gc >= gd) {
      b = d;
      d = c;
      gd = gc;
      c = b - phi * (b - a);
      gc = g(c);
    } else {
      a = c;
      c = d;
      gc = gd;
      d = a + phi * (b - a);
      gd = g(d);
    }
  }
  double best = std::max({gc, gd, gs, 0.0});
  return best;
}

YoungFunction tabulated_conjugate(const YoungFunction& A) {
  const auto& xs = A.table_t();
  const auto& ys = A.table_y();
  double c = A.coefficient();
  std::vector<double> st{0.0}, sy{0.0};
  for (size_t i = 0; i + 1 < xs.size(); ++i) {
    double sigma = c * (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]);
    double val = sigma * xs[i + 1] - c * ys[i + 1];
    val = std::max(val, 0.0);
    if (sigma > st.back()) {
      st.push_back(sigma);
      sy.push_back(val);
    } else {
      sy.back() = std::max(sy.back(), val);
    }
  }
  if (A.infinite_tail()) {
    // past the last slope the conjugate grows with slope equal to the last abscissa
    double te = st.back() > 0.0 ? 2.0 * st.back() : 1.0;
    st.push_back(te);
    sy.push_back(std::max(te * xs.back() - c * ys.back(), sy.back()));
  }
  if (st.size() < 2) throw UnboundedConjugate("complementary function of a linear table is not finite");
  // Original linear tail -> conjugate infinite beyond the last slope, and vice versa.
  return YoungFunction::tabulated(std::move(st), std::move(sy), !A.infinite_tail());
}

YoungFunction numeric_conjugate(const YoungFunction& A) {
  const double t_lo = 1e-6, t_hi = 1e9;
  const int per_decade = 256;
  const int nodes = 15 * per_decade;
  std::vector<double> ts, ys;
  ts.reserve(nodes + 1);
  ys.reserve(nodes + 1);
  bool overflow = false;
  for (int k = 0; k <= nodes; ++k) {
    double t = t_lo * std::pow(10.0, static_cast<double>(k) / per_decade);
    if (k == nodes) t = t_hi;
    double v = kInf;
    try {
      v = legendre_point(A, t);
    } catch (const UnboundedConjugate&) {
      // exp-type growth of the conjugate; the table ends here with an infinite tail
      if (k == 0) throw;
    }
    if (!std::isfinite(v) || v > 1e300) {
      overflow = true;
      break;
    }
    ts.push_back(t);
    ys.push_back(v);
  }
  // drop the flat leading part except its last point so slopes stay well defined
  std::vector<double> ct, cy;
  for (size_t i = 0; i < ts.size(); ++i) {
    if (ys[i] == 0.0 && i + 1 < ts.size() && ys[i + 1] == 0.0) continue;
    ct.push_back(ts[i]);
    cy.push_back(ys[i]);
  }
  if (ct.empty()) throw UnboundedConjugate("complementary function overflows on the whole range");
  if (ct.front() != 0.0) {
    ct.insert(ct.begin(), 0.0);
    cy.insert(cy.begin(), 0.0);
  }
  // enforce convexity against rounding in the pointwise maximization
  for (size_t i = 1; i + 1 < ct.size(); ++i) {
    double s0 = (cy[i] - cy[i - 1]) / (ct[i] - ct[i - 1]);
    double s1 = (cy[i + 1] - cy[i]) / (ct[i + 1] - ct[i]);
    if (s1 < s0) cy[i + 1] = cy[i] + s0 * (ct[i + 1] - ct[i]);
  }
  return YoungFunction::tabulated(std::move(ct), std::move(cy), overflow);
}

}  // namespace

YoungFunction YoungFunction::power(double r, double coef) {
  require(r >= 1.0 && std::isfinite(r), "power exponent must be >= 1");
  require(coef > 0.0 && std::isfinite(coef), "coefficient must be positive");
  return YoungFunction(make(YoungFamily::Power, {r}, coef));
}

YoungFunction YoungFunction::llogl(double alpha) {
  require(alpha >= 0.0, "llogl exponent must be >= 0");
  return YoungFunction(make(YoungFamily::LLogL, {alpha}));
}

YoungFunction YoungFunction::expl(double gamma) {
  require(gamma > 0.0, "expl exponent must be > 0");
  return YoungFunction(make(YoungFamily::ExpL, {gamma}));
}

YoungFunction YoungFunction::lll(double l, double alpha) {
  require(l >= 0.0 && alpha >= 0.0, "lll exponents must be >= 0");
  return YoungFunction(make(YoungFamily::LLogLLogLogL, {l, alpha}));
}

YoungFunction YoungFunction::phi(int j) {
  require(j >= 0, "phi index must be >= 0");
  return YoungFunction(make(YoungFamily::PhiJ, {static_cast<double>(j)}));
}

YoungFunction YoungFunction::compose(const YoungFunction& outer, const YoungFunction& inner) {
  auto n = std::make_shared<Node>();
  n->family = YoungFamily::Compose;
  n->a = outer.node_;
  n->b = inner.node_;
  return YoungFunction(n);
}

YoungFunction YoungFunction::product(const YoungFunction& a, const YoungFunction& b) {
  auto n = std::make_shared<Node>();
  n->family = YoungFamily::Product;
  n->a = a.node_;
  n->b = b.node_;
  return YoungFunction(n);
}

YoungFunction YoungFunction::tabulated(std::vector<double> t, std::vector<double> y, bool infinite_tail) {
  require(t.size() == y.size() && !t.empty(), "table needs matching nonempty columns");
  if (t.front() != 0.0) {
    t.insert(t.begin(), 0.0);
    y.insert(y.begin(), 0.0);
  }
  require(y.front() == 0.0, "table must satisfy A(0) = 0");
  require(t.size() >= 2, "table needs at least one positive breakpoint");
  auto n = std::make_shared<Node>();
  n->family = YoungFamily::Tabulated;
  n->infinite_tail = infinite_tail;
  n->slope.resize(t.size() - 1);
  for (size_t i = 0; i + 1 < t.size(); ++i) {
    require(t[i + 1] > t[i], "table abscissae must increase");
    require(y[i + 1] >= y[i] && std::isfinite(y[i + 1]), "table values must be finite and nondecreasing");
    n->slope[i] = (y[i + 1] - y[i]) / (t[i + 1] - t[i]);
    if (i > 0 && n->slope[i] < n->slope[i - 1] * (1.0 - 1e-12))
      throw std::invalid_argument("table is not convex at t = " + fmt_num(t[i]));
    if (i > 0) n->slope[i] = std::max(n->slope[i], n->slope[i - 1]);
  }
  require(y.back() > 0.0, "table must not be identically zero");
  n->t = std::move(t);
  n->y = std::move(y);
  return YoungFunction(n);
}

double YoungFunction::operator()(double t) const {
  if (!(t >= 0.0)) throw std::domain_error("Young function evaluated at negative argument");
  return eval_node(*node_, t);
}

double YoungFunction::inverse(double y) const {
  if (!(y >= 0.0)) throw std::domain_error("Young inverse of negative value");
  if (y == 0.0) return 0.0;
  const Node& n = *node_;
  if (n.family == YoungFamily::Power) return std::pow(y / n.coef, 1.0 / n.params[0]);
  if (n.family == YoungFamily::Tabulated) {
    double target = y / n.coef;
    if (target > n.y.back()) {
      if (n.infinite_tail || n.slope.back() <= 0.0)
        throw std::range_error("value beyond the tabulation range of a Young table");
      return n.t.back() + (target - n.y.back()) / n.slope.back();
    }
    auto it = std::lower_bound(n.y.begin(), n.y.end(), target);
    size_t i = static_cast<size_t>(it - n.y.begin());
    if (i == 0) return 0.0;
    return n.t[i - 1] + (target - n.y[i - 1]) / n.slope[i - 1];
  }
  if (std::isinf(y)) return kInf;
  double hi = 1.0;
  while ((*this)(hi) < y) {
    hi *= 2.0;
    if (hi > 1e300) throw std::range_error("Young inverse out of range");
  }
  double lo = 0.5 * hi;
  while ((*this)(lo) >= y) {
    lo *= 0.5;
    if (lo < 1e-300) return lo;
  }
  for (int it = 0; it < 400 && hi - lo > 1e-16 * hi; ++it) {
    double mid = 0.5 * (lo + hi);
    if ((*this)(mid) < y)
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

YoungFamily YoungFunction::family() const { return node_->family; }
const std::vector<double>& YoungFunction::params() const { return node_->params; }
double YoungFunction::coefficient() const { return node_->coef; }
const std::vector<double>& YoungFunction::table_t() const { return node_->t; }
const std::vector<double>& YoungFunction::table_y() const { return node_->y; }
bool YoungFunction::infinite_tail() const { return node_->infinite_tail; }

YoungFunction YoungFunction::scaled(double c) const {
  require(c > 0.0 && std::isfinite(c), "scale must be positive");
  auto n = std::make_shared<Node>(*node_);
  n->coef *= c;
  return YoungFunction(n);
}

namespace {
std::string node_string(const YoungFunction::Node& n) {
  std::string body;
  auto p = [&](size_t i) { return fmt_num(n.params[i]); };
  switch (n.family) {
    case YoungFamily::Power:
      return n.coef == 1.0 ? "power(" + p(0) + ")" : "power(" + p(0) + "," + fmt_num(n.coef) + ")";
    case YoungFamily::LLogL: body = "llogl(" + p(0) + ")"; break;
    case YoungFamily::ExpL: body = "expl(" + p(0) + ")"; break;
    case YoungFamily::LLogLLogLogL: body = "lll(" + p(0) + "," + p(1) + ")"; break;
    case YoungFamily::PhiJ: body = "phi(" + p(0) + ")"; break;
    case YoungFamily::Compose: body = "compose(" + node_string(*n.a) + "," + node_string(*n.b) + ")"; break;
    case YoungFamily::Product: body = "prod(" + node_string(*n.a) + "," + node_string(*n.b) + ")"; break;
    case YoungFamily::Tabulated: body = "table(" + std::to_string(n.t.size()) + ")"; break;
  }
  return n.coef == 1.0 ? body : "scale(" + fmt_num(n.coef) + "," + body + ")";
}
}  // namespace

std::string YoungFunction::to_string() const { return node_string(*node_); }

double eval_young(const YoungFunction& A, double t) { return A(t); }
double inverse_young(const YoungFunction& A, double y) { return A.inverse(y); }

YoungFunction complementary(const YoungFunction& A) {
  if (A.family() == YoungFamily::Power) {
    double r = A.params()[0], c = A.coefficient();
    if (r == 1.0) throw UnboundedConjugate("complementary function of a linear Young function is not finite");
    double rp = r / (r - 1.0);
    return YoungFunction::power(rp, c * (r - 1.0) * std::pow(c * r, -rp));
  }
  if (A.family() == YoungFamily::Tabulated) return tabulated_conjugate(A);
  return numeric_conjugate(A);
}

}  // namespace hlab
