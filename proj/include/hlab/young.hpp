#pragma once

#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace hlab {

enum class YoungFamily { Power, LLogL, ExpL, LLogLLogLogL, PhiJ, Compose, Product, Tabulated };

struct UnboundedConjugate : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Immutable, cheap to copy; every instance carries a positive scalar multiplier.
class YoungFunction {
 public:
  static YoungFunction power(double r, double coef = 1.0);
  static YoungFunction llogl(double alpha);
  static YoungFunction expl(double gamma);
  static YoungFunction lll(double l, double alpha);
  static YoungFunction phi(int j);
  // outer(inner(t))
  static YoungFunction compose(const YoungFunction& outer, const YoungFunction& inner);
  static YoungFunction product(const YoungFunction& a, const YoungFunction& b);
  // Breakpoints (t_i, A(t_i)) with t increasing; (0,0) is prepended when missing.
  // Slopes must be nondecreasing. Beyond the last breakpoint the last slope is used,
  // or +inf when infinite_tail is set.
  static YoungFunction tabulated(std::vector<double> t, std::vector<double> y, bool infinite_tail = false);

  double operator()(double t) const;
  double inverse(double y) const;

  YoungFamily family() const;
  const std::vector<double>& params() const;
  double coefficient() const;
  YoungFunction scaled(double c) const;
  std::string to_string() const;

  // Tabulated support: breakpoints and tail mode.
  const std::vector<double>& table_t() const;
  const std::vector<double>& table_y() const;
  bool infinite_tail() const;

  struct Node;

 private:
  explicit YoungFunction(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

double eval_young(const YoungFunction& A, double t);
double inverse_young(const YoungFunction& A, double y);

// Legendre transform. Closed form for Power and exact for Tabulated; numeric otherwise.
YoungFunction complementary(const YoungFunction& A);

// Grammar: power(r[,c]) llogl(a) expl(g) lll(l,a) phi(j) prod(e1,e2) compose(e1,e2) scale(c,e)
YoungFunction parse_young(const std::string& text);

// inf{lambda : sum A(|v_i|/lambda) mu_i / sum mu_i <= 1}. mu may be empty (uniform).
double luxemburg(std::span<const double> values, std::span<const double> mu, const YoungFunction& A);

struct ClassCertificate {
  double p0 = 1, p1 = 1;
  double t_A = 1;
  double c_p0 = 1, c_p1 = 1;
  double t_min = 0, t_max = 0;
  bool ok = false;
  std::optional<double> first_violation;
};

struct SampleRange {
  double t_min = 1e-6;
  double t_max = 1e9;
  int per_decade = 32;
};

ClassCertificate young_class_certificate(const YoungFunction& A, double p0, double p1,
                                         const SampleRange& grid = {},
                                         std::optional<double> t_A = std::nullopt);

struct IntegralResult {
  double value = 0;
  double tail = 0;
  bool converged = false;
};

IntegralResult bp_check(const YoungFunction& A, double p, double t_max = 1e300);

struct KappaVariant {
  bool iterated = false;
  int m = 0;
  int h = 0;
};

// Integral part only; the additive dimensional constant of the iterated variant is not included.
IntegralResult kappa_phi(const YoungFunction& A, const YoungFunction& phi, KappaVariant variant = {});

struct KrA {
  double value = 0;
  bool finite = false;
};

KrA krA_constant(const YoungFunction& A, double r, double t_max = 1e12);

// sup_t ratio over a log grid of A^{-1}(t) Abar^{-1}(t) / t, and its inf.
struct BracketStats {
  double min_ratio = 0;
  double max_ratio = 0;
};
BracketStats aabar_bracket(const YoungFunction& A, const YoungFunction& Abar, std::span<const double> ts);

}  // namespace hlab
