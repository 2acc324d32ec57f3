#include "hlab/functions.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <random>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "quadrature.hpp"

namespace hlab {

namespace {

constexpr double kPi = std::numbers::pi;

struct Atom {
  std::string name;
  std::vector<double> args;
  std::string text;  // table path
};

struct Term {
  double coef = 1.0;
  std::optional<Atom> atom;
};

class LiteralParser {
 public:
  explicit LiteralParser(const std::string& s) : s_(s) {}

  std::vector<Term> parse() {
    std::vector<Term> out;
    double sign = 1.0;
    skip();
    if (peek('-')) {
      ++pos_;
      sign = -1.0;
    } else if (peek('+')) {
      ++pos_;
    }
    while (true) {
      Term t = term();
      t.coef *= sign;
      out.push_back(t);
      skip();
      if (pos_ == s_.size()) break;
      if (peek('+'))
        sign = 1.0;
      else if (peek('-'))
        sign = -1.0;
      else
        fail("expected '+' or '-'");
      ++pos_;
    }
    return out;
  }

 private:
  [[noreturn]] void fail(const std::string& what) const {
    throw std::invalid_argument("function literal '" + s_ + "': " + what);
  }
  void skip() {
    while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
  }
  bool peek(char c) {
    skip();
    return pos_ < s_.size() && s_[pos_] == c;
  }
  bool at_number() {
    skip();
    return pos_ < s_.size() && (std::isdigit(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '.');
  }
  double number() {
    skip();
    const char* b = s_.c_str() + pos_;
    char* e = nullptr;
    double v = std::strtod(b, &e);
    if (e == b) fail("expected number");
    pos_ += static_cast<size_t>(e - b);
    return v;
  }
  Term term() {
    Term t;
    if (at_number()) {
      t.coef = number();
      if (!peek('*')) return t;
      ++pos_;
    }
    t.atom = atom();
    if (peek('*')) {
      ++pos_;
      t.coef *= number();
    }
    return t;
  }
  Atom atom() {
    skip();
    size_t b = pos_;
    while (pos_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[pos_])) || s_[pos_] == '_')) ++pos_;
    Atom a;
    a.name = s_.substr(b, pos_ - b);
    if (a.name.empty()) fail("expected function name");
    if (!peek('(')) {
      if (a.name == "log_abs") return a;
      fail("expected '('");
    }
    ++pos_;
    if (a.name == "table") {
      size_t close = s_.find(')', pos_);
      if (close == std::string::npos) fail("unterminated table path");
      a.text = s_.substr(pos_, close - pos_);
      while (!a.text.empty() && std::isspace(static_cast<unsigned char>(a.text.back()))) a.text.pop_back();
      while (!a.text.empty() && std::isspace(static_cast<unsigned char>(a.text.front()))) a.text.erase(0, 1);
      pos_ = close + 1;
      return a;
    }
    if (peek(')')) {
      ++pos_;
      return a;
    }
    while (true) {
      skip();
      double sign = 1.0;
      if (peek('-')) {
        ++pos_;
        sign = -1.0;
      }
      a.args.push_back(sign * number());
      if (peek(',')) {
        ++pos_;
        continue;
      }
      if (!peek(')')) fail("expected ')'");
      ++pos_;
      return a;
    }
  }

  const std::string& s_;
  size_t pos_ = 0;
};

double arg(const Atom& a, size_t i, double dflt) { return i < a.args.size() ? a.args[i] : dflt; }

double power_antideriv(double u, double a) {
  return std::copysign(std::pow(std::abs(u), a + 1.0), u) / (a + 1.0);
}

double log_antideriv(double u) {
  if (u == 0.0) return 0.0;
  return u * std::log(std::abs(u)) - u;
}

uint64_t splitmix(uint64_t& s) {
  uint64_t z = (s += 0x9E3779B97F4A7C15ULL);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

std::vector<double> step_values(uint64_t seed, int levels) {
  std::vector<double> v(size_t{1} << levels);
  uint64_t s = seed;
  for (auto& x : v) x = 2.0 * (static_cast<double>(splitmix(s) >> 11) * 0x1.0p-53) - 1.0;
  return v;
}

// Average over [lo,hi) of a step function with equal pieces on [a, a+len).
double step_average(const std::vector<double>& v, double a, double len, double lo, double hi) {
  double piece = len / static_cast<double>(v.size());
  double s = 0.0;
  auto k0 = static_cast<int64_t>(std::floor((lo - a) / piece));
  auto k1 = static_cast<int64_t>(std::ceil((hi - a) / piece));
  for (int64_t k = std::max<int64_t>(0, k0); k < std::min<int64_t>(static_cast<int64_t>(v.size()), k1); ++k) {
    double pl = a + piece * static_cast<double>(k), ph = pl + piece;
    double ov = std::min(hi, ph) - std::max(lo, pl);
    if (ov > 0.0) s += ov * v[static_cast<size_t>(k)];
  }
  return s / (hi - lo);
}

std::vector<std::vector<double>> read_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open table " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    bool numeric = true;
    while (std::getline(ss, cell, ',')) {
      char* e = nullptr;
      double v = std::strtod(cell.c_str(), &e);
      if (e == cell.c_str()) {
        numeric = false;
        break;
      }
      row.push_back(v);
    }
    if (numeric && !row.empty()) rows.push_back(row);
  }
  return rows;
}

// Adds coef * atom to out.
void add_atom_1d(const Grid& g, const Atom& a, double coef, std::vector<double>& out, const std::string& base) {
  const double h = g.cell_side();
  const int64_t n = g.per_side();
  auto each = [&](auto&& avg) {
    for (int64_t i = 0; i < n; ++i) {
      double lo = g.origin[0] + h * static_cast<double>(i), hi = lo + h;
      out[i] += coef * avg(lo, hi);
    }
  };
  if (a.name == "const") {
    each([&](double, double) { return arg(a, 0, 1.0); });
  } else if (a.name == "power_abs") {
    double p = arg(a, 0, 1.0), x0 = arg(a, 1, 0.0);
    if (!(p > -1.0)) throw std::invalid_argument("power_abs exponent must exceed -1 in one dimension");
    each([&](double lo, double hi) { return (power_antideriv(hi - x0, p) - power_antideriv(lo - x0, p)) / h; });
  } else if (a.name == "log_abs") {
    double x0 = arg(a, 0, 0.0);
    each([&](double lo, double hi) { return (log_antideriv(hi - x0) - log_antideriv(lo - x0)) / h; });
  } else if (a.name == "indicator") {
    double l = arg(a, 0, 0.0), r = arg(a, 1, 0.0);
    each([&](double lo, double hi) { return std::max(0.0, std::min(hi, r) - std::max(lo, l)) / h; });
  } else if (a.name == "ball_power") {
    double p = arg(a, 0, 0.0), rad = arg(a, 1, 1.0), x0 = arg(a, 2, 0.0);
    if (!(p > -1.0)) throw std::invalid_argument("ball_power exponent must exceed -1 in one dimension");
    each([&](double lo, double hi) {
      double l = std::max(lo, x0 - rad) - x0, r = std::min(hi, x0 + rad) - x0;
      if (!(r > l)) return 0.0;
      return (power_antideriv(r, p) - power_antideriv(l, p)) / h;
    });
  } else if (a.name == "sin") {
    double w = 2.0 * kPi * arg(a, 0, 1.0);
    each([&](double lo, double hi) { return (std::cos(w * lo) - std::cos(w * hi)) / (w * h); });
  } else if (a.name == "steps") {
    auto v = step_values(static_cast<uint64_t>(arg(a, 0, 1.0)), static_cast<int>(arg(a, 1, 3.0)));
    each([&](double lo, double hi) { return step_average(v, g.origin[0], g.side, lo, hi); });
  } else if (a.name == "table") {
    auto path = std::filesystem::path(a.text);
    if (path.is_relative()) path = std::filesystem::path(base) / path;
    auto rows = read_csv(path.string());
    if (rows.size() == static_cast<size_t>(g.cell_count()) && rows[0].size() == 1) {
      for (size_t i = 0; i < rows.size(); ++i) out[i] += coef * rows[i][0];
      return;
    }
    // (x, value) breakpoints: right-continuous step function
    for (const auto& r : rows)
      if (r.size() < 2) throw std::invalid_argument("table rows need x,value or one value per cell");
    each([&](double lo, double hi) {
      double s = 0.0;
      for (size_t k = 0; k < rows.size(); ++k) {
        double pl = rows[k][0], ph = k + 1 < rows.size() ? rows[k + 1][0] : 1e300;
        double ov = std::min(hi, ph) - std::max(lo, pl);
        if (ov > 0.0) s += ov * rows[k][1];
      }
      return s / h;
    });
  } else {
    throw std::invalid_argument("unknown function atom '" + a.name + "'");
  }
}

void add_atom_2d(const Grid& g, const Atom& a, double coef, std::vector<double>& out, const std::string&) {
  const double h = g.cell_side();
  const int64_t n = g.per_side();
  const double vol = h * h;
  auto each = [&](auto&& integral) {
    for (int64_t i = 0; i < n; ++i)
      for (int64_t j = 0; j < n; ++j) {
        double x0 = g.origin[0] + h * static_cast<double>(i), y0 = g.origin[1] + h * static_cast<double>(j);
        out[i * n + j] += coef * integral(x0, x0 + h, y0, y0 + h) / vol;
      }
  };
  auto radial = [&](std::array<double, 2> c, std::function<double(double)> prof, std::function<double(double)> disk) {
    each([&](double x0, double x1, double y0, double y1) {
      auto f = [&](double x, double y) { return prof(std::hypot(x - c[0], y - c[1])); };
      return quad::box_singular(f, x0, x1, y0, y1, c, disk);
    });
  };
  if (a.name == "const") {
    each([&](double, double, double, double) { return arg(a, 0, 1.0) * vol; });
  } else if (a.name == "power_abs") {
    double p = arg(a, 0, 1.0);
    if (!(p > -2.0)) throw std::invalid_argument("power_abs exponent must exceed -2 in two dimensions");
    radial({arg(a, 1, 0.0), arg(a, 2, 0.0)}, [p](double r) { return std::pow(r, p); },
           [p](double rho) { return 2.0 * kPi * std::pow(rho, p + 2.0) / (p + 2.0); });
  } else if (a.name == "log_abs") {
    radial({arg(a, 0, 0.0), arg(a, 1, 0.0)}, [](double r) { return std::log(r); },
           [](double rho) { return 2.0 * kPi * (0.5 * rho * rho * std::log(rho) - 0.25 * rho * rho); });
  } else if (a.name == "ball_power") {
    double p = arg(a, 0, 0.0), rad = arg(a, 1, 1.0);
    if (!(p > -2.0)) throw std::invalid_argument("ball_power exponent must exceed -2 in two dimensions");
    radial({arg(a, 2, 0.0), arg(a, 3, 0.0)}, [p, rad](double r) { return r < rad ? std::pow(r, p) : 0.0; },
           [p, rad](double rho) { return 2.0 * kPi * std::pow(std::min(rho, rad), p + 2.0) / (p + 2.0); });
  } else if (a.name == "indicator") {
    double l0 = arg(a, 0, 0.0), r0 = arg(a, 1, 0.0);
    double l1 = a.args.size() >= 4 ? a.args[2] : -1e300, r1 = a.args.size() >= 4 ? a.args[3] : 1e300;
    each([&](double x0, double x1, double y0, double y1) {
      return std::max(0.0, std::min(x1, r0) - std::max(x0, l0)) * std::max(0.0, std::min(y1, r1) - std::max(y0, l1));
    });
  } else if (a.name == "sin") {
    double w = 2.0 * kPi * arg(a, 0, 1.0);
    each([&](double x0, double x1, double y0, double y1) { return (std::cos(w * x0) - std::cos(w * x1)) / w * (y1 - y0); });
  } else if (a.name == "steps") {
    auto v = step_values(static_cast<uint64_t>(arg(a, 0, 1.0)), static_cast<int>(arg(a, 1, 3.0)));
    each([&](double x0, double x1, double y0, double y1) {
      return step_average(v, g.origin[0], g.side, x0, x1) * (x1 - x0) * (y1 - y0);
    });
  } else {
    throw std::invalid_argument("function atom '" + a.name + "' is not available in two dimensions");
  }
}

}  // namespace

GridFunction make_function(const Grid& g, const std::string& literal, const std::string& base_dir) {
  auto terms = LiteralParser(literal).parse();
  std::vector<double> out(static_cast<size_t>(g.cell_count()), 0.0);
  for (const auto& t : terms) {
    if (!t.atom) {
      for (auto& v : out) v += t.coef;
      continue;
    }
    if (g.dim == 1)
      add_atom_1d(g, *t.atom, t.coef, out, base_dir);
    else
      add_atom_2d(g, *t.atom, t.coef, out, base_dir);
  }
  return GridFunction(g, std::move(out));
}

}  // namespace hlab
