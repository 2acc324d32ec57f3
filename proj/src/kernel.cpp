#include "hlab/kernel.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <numbers>
#include <regex>
#include <sstream>
#include <stdexcept>

#include "quadrature.hpp"

namespace hlab {

namespace {
constexpr double kPi = std::numbers::pi;
constexpr double kE = std::numbers::e;
}  // namespace

struct Kernel::Impl {
  KernelInfo info;
  virtual ~Impl() = default;
  virtual double value(Point x, Point y) const = 0;
  // convolution kernels only: k at displacement s
  virtual double at(Point) const { throw std::logic_error("kernel is not of convolution type"); }
  virtual double cell_integral(Point s, double h) const {
    if (info.singular && s[0] == 0.0 && s[1] == 0.0) return 0.0;
    double vol = info.dim == 1 ? h : h * h;
    return at(s) * vol;
  }
  virtual double profile(double) const { throw std::logic_error("kernel has no radial profile"); }
  std::optional<YoungFunction> young;
  std::vector<double> omega, matrix;
};

namespace {

double norm(Point s, int dim) { return dim == 1 ? std::abs(s[0]) : std::hypot(s[0], s[1]); }

struct ConvImpl : Kernel::Impl {
  double value(Point x, Point y) const override { return at({x[0] - y[0], x[1] - y[1]}); }
};

struct HilbertImpl : ConvImpl {
  double at(Point s) const override { return s[0] == 0.0 ? 0.0 : 1.0 / s[0]; }
};

struct DiniImpl : ConvImpl {
  double at(Point s) const override {
    double t = norm(s, info.dim);
    if (t == 0.0) return 0.0;
    double osc = 1.0 + 0.5 * std::pow(std::abs(std::sin(kPi * std::log2(t))), info.delta);
    if (info.dim == 1) return info.ck * std::copysign(1.0, s[0]) / t * osc;
    return info.ck * (s[0] / t) / (t * t) * osc;
  }
};

struct HomogImpl : ConvImpl {
  double at(Point s) const override {
    double t2 = s[0] * s[0] + s[1] * s[1];
    if (t2 == 0.0) return 0.0;
    double th = std::atan2(s[1], s[0]);
    if (th < 0.0) th += 2.0 * kPi;
    return omega_at(omega, th) / t2;
  }
};

struct CounterImpl : ConvImpl {
  std::function<double(double)> ainv;

  double profile(double t) const override {
    if (!(t > 0.0 && t < 1.0)) return 0.0;
    double u = 1.0 / (std::pow(t, info.dim) * std::pow(1.0 - std::log(t), 1.0 + info.beta));
    return ainv(u);
  }
  double at(Point s) const override {
    return profile(norm({s[0] - info.eta[0], s[1] - info.eta[1]}, info.dim));
  }
  // int_a^b k(v) dv for 0 <= a < b, via v = w^2
  double radial_1d(double a, double b) const {
    a = std::min(a, 1.0);
    b = std::min(b, 1.0);
    if (!(b > a)) return 0.0;
    auto f = [&](double w) { return profile(w * w) * 2.0 * w; };
    return quad::interval(f, std::sqrt(a), std::sqrt(b), 1e-10);
  }
  double disk(double rho) const {
    rho = std::min(rho, 1.0);
    auto f = [&](double w) {
      double t = w * w;
      return profile(t) * t * 2.0 * w;
    };
    return 2.0 * kPi * quad::interval(f, 0.0, std::sqrt(rho), 1e-10);
  }
  double cell_integral(Point s, double h) const override {
    if (info.dim == 1) {
      double a = s[0] - 0.5 * h - info.eta[0], b = s[0] + 0.5 * h - info.eta[0];
      if (b <= -1.0 || a >= 1.0) return 0.0;
      if (a >= 0.0) return radial_1d(a, b);
      if (b <= 0.0) return radial_1d(-b, -a);
      return radial_1d(0.0, -a) + radial_1d(0.0, b);
    }
    double x0 = s[0] - 0.5 * h - info.eta[0], x1 = x0 + h;
    double y0 = s[1] - 0.5 * h - info.eta[1], y1 = y0 + h;
    double dx = std::max({x0, -x1, 0.0}), dy = std::max({y0, -y1, 0.0});
    if (std::hypot(dx, dy) >= 1.0) return 0.0;
    auto f = [&](double x, double y) { return profile(std::hypot(x, y)); };
    return quad::box_singular(f, x0, x1, y0, y1, {0.0, 0.0}, [&](double rho) { return disk(rho); }, 6);
  }
};

struct MatrixImpl : Kernel::Impl {
  double value(Point, Point) const override {
    throw std::logic_error("matrix kernels are evaluated through a discrete operator");
  }
};

struct GenericImpl : Kernel::Impl {
  std::function<double(Point, Point)> fn;
  double value(Point x, Point y) const override { return fn(x, y); }
};

}  // namespace

double omega_at(const std::vector<double>& samples, double theta) {
  const double m = static_cast<double>(samples.size());
  double pos = theta / (2.0 * kPi) * m;
  pos -= m * std::floor(pos / m);
  auto i = static_cast<size_t>(pos);
  if (i >= samples.size()) i = samples.size() - 1;
  double fr = pos - static_cast<double>(i);
  return samples[i] * (1.0 - fr) + samples[(i + 1) % samples.size()] * fr;
}

YoungFunction counterexample_young(double r, double beta) {
  auto ainv = [=](double u) { return std::pow(u, 1.0 / r) / std::pow(std::log(kE + u), 0.5 * (1.0 + beta)); };
  std::vector<double> t, y;
  const int per_decade = 64;
  for (int k = -12 * per_decade; k <= 250 * per_decade; ++k) {
    double u = std::pow(10.0, static_cast<double>(k) / per_decade);
    t.push_back(ainv(u));
    y.push_back(u);
  }
  return YoungFunction::tabulated(std::move(t), std::move(y));
}

Kernel Kernel::hilbert() {
  auto p = std::make_shared<HilbertImpl>();
  p->info = {KernelFamily::Hilbert, 1, true, true, "hilbert"};
  return Kernel(p);
}

Kernel Kernel::dini(double delta, double ck, int dim) {
  if (!(delta > 0.0 && delta <= 1.0)) throw std::invalid_argument("Dini modulus exponent must lie in (0,1]");
  if (dim != 1 && dim != 2) throw std::invalid_argument("Dini kernels need dimension 1 or 2");
  auto p = std::make_shared<DiniImpl>();
  p->info = {KernelFamily::DiniCZ, dim, true, true, "dini"};
  p->info.delta = delta;
  p->info.ck = ck;
  return Kernel(p);
}

Kernel Kernel::homogeneous(std::vector<double> omega_samples) {
  if (omega_samples.size() < 4) throw std::invalid_argument("need at least 4 angular samples");
  double mean = 0.0, mx = 0.0;
  for (double v : omega_samples) {
    mean += v;
    mx = std::max(mx, std::abs(v));
  }
  mean /= static_cast<double>(omega_samples.size());
  if (std::abs(mean) > 1e-10 * std::max(1.0, mx)) throw std::invalid_argument("Omega must have mean zero on the circle");
  auto p = std::make_shared<HomogImpl>();
  p->info = {KernelFamily::Homogeneous, 2, true, true, "homog"};
  p->omega = std::move(omega_samples);
  return Kernel(p);
}

Kernel Kernel::counterexample(double r, double beta, double eta, int dim, std::optional<YoungFunction> A) {
  if (!(beta > 0.0)) throw std::invalid_argument("counterexample needs beta > 0");
  if (!(r >= 1.0)) throw std::invalid_argument("counterexample needs r >= 1");
  auto p = std::make_shared<CounterImpl>();
  p->info = {KernelFamily::Counterexample, dim, false, true, "counter"};
  p->info.r = r;
  p->info.beta = beta;
  p->info.eta = {eta, 0.0};
  if (A) {
    YoungFunction a = *A;
    p->ainv = [a](double u) { return a.inverse(u); };
    p->young = a;
  } else {
    p->ainv = [=](double u) {
      if (std::isinf(u)) return u;
      return std::pow(u, 1.0 / r) / std::pow(std::log(kE + u), 0.5 * (1.0 + beta));
    };
    p->young = counterexample_young(r, beta);
  }
  return Kernel(p);
}

Kernel Kernel::matrix(std::vector<double> values, size_t n, int dim) {
  if (values.size() != n * n) throw std::invalid_argument("matrix kernel must be square");
  auto p = std::make_shared<MatrixImpl>();
  p->info = {KernelFamily::Matrix, dim, false, false, "matrix"};
  p->matrix = std::move(values);
  return Kernel(p);
}

Kernel Kernel::generic(std::function<double(Point, Point)> fn, int dim) {
  auto p = std::make_shared<GenericImpl>();
  p->info = {KernelFamily::Generic, dim, false, false, "generic"};
  p->fn = std::move(fn);
  return Kernel(p);
}

double Kernel::operator()(Point x, Point y) const { return impl_->value(x, y); }
double Kernel::cell_integral(Point s, double h) const { return impl_->cell_integral(s, h); }
const KernelInfo& Kernel::info() const { return impl_->info; }
double Kernel::profile(double t) const { return impl_->profile(t); }
const YoungFunction& Kernel::young() const {
  if (!impl_->young) throw std::logic_error("kernel carries no Young function");
  return *impl_->young;
}
const std::vector<double>& Kernel::omega() const { return impl_->omega; }
const std::vector<double>& Kernel::matrix_values() const { return impl_->matrix; }

namespace {

std::vector<std::string> split_top(const std::string& s) {
  std::vector<std::string> out;
  int depth = 0;
  std::string cur;
  for (char c : s) {
    if (c == '(') ++depth;
    if (c == ')') --depth;
    if (c == ',' && depth == 0) {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

std::string trim(std::string s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.pop_back();
  size_t b = 0;
  while (b < s.size() && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  return s.substr(b);
}

std::vector<double> read_numbers(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open " + path);
  std::vector<double> out;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      cell = trim(cell);
      if (cell.empty()) continue;
      out.push_back(std::stod(cell));
    }
  }
  return out;
}

double num(const std::map<std::string, std::string>& kv, const std::string& key, double dflt) {
  auto it = kv.find(key);
  return it == kv.end() ? dflt : std::stod(it->second);
}

}  // namespace

Kernel make_kernel(const std::string& spec_in, int dim, const std::string& base_dir) {
  std::string spec = trim(spec_in);
  auto open = spec.find('(');
  std::string name = trim(spec.substr(0, open));
  std::string body;
  if (open != std::string::npos) {
    if (spec.back() != ')') throw std::invalid_argument("kernel spec missing ')': " + spec);
    body = spec.substr(open + 1, spec.size() - open - 2);
  }
  std::map<std::string, std::string> kv;
  std::vector<std::string> positional;
  for (auto& part : split_top(body)) {
    auto eq = part.find('=');
    auto pp = part.find('(');
    if (eq != std::string::npos && (pp == std::string::npos || eq < pp))
      kv[trim(part.substr(0, eq))] = trim(part.substr(eq + 1));
    else if (!trim(part).empty())
      positional.push_back(trim(part));
  }
  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_relative() ? (std::filesystem::path(base_dir) / path).string() : path.string();
  };
  Kernel k = [&]() -> Kernel {
    if (name == "hilbert") {
      if (dim != 1) throw std::invalid_argument("the Hilbert kernel is one-dimensional");
      return Kernel::hilbert();
    }
    if (name == "dini") {
      double delta = 1.0;
      if (kv.count("omega")) {
        // the modulus t^d is concave, so it is read here rather than as a Young function
        static const std::regex re(R"(\s*power\(\s*([-+0-9.eE]+)\s*\)\s*)");
        std::smatch mm;
        const std::string w = kv["omega"];
        if (!std::regex_match(w, mm, re)) throw std::invalid_argument("dini omega must be power(d), got '" + w + "'");
        delta = std::stod(mm[1].str());
      }
      if (kv.count("delta")) delta = std::stod(kv["delta"]);
      return Kernel::dini(delta, num(kv, "ck", 1.0), dim);
    }
    if (name == "homog") {
      if (dim != 2) throw std::invalid_argument("homogeneous kernels are two-dimensional");
      std::vector<double> s;
      if (kv.count("omega_table")) {
        s = read_numbers(resolve(kv["omega_table"]));
      } else {
        std::string w = kv.count("omega") ? kv["omega"] : "cos";
        const int m = 256;
        for (int i = 0; i < m; ++i) {
          double th = 2.0 * kPi * i / m;
          if (w == "cos")
            s.push_back(std::cos(th));
          else if (w == "jump")
            s.push_back(i == 0 || i == m / 2 ? 0.0 : (i < m / 2 ? 1.0 : -1.0));
          else if (w == "one")
            s.push_back(1.0);
          else
            throw std::invalid_argument("unknown builtin omega '" + w + "'");
        }
      }
      return Kernel::homogeneous(std::move(s));
    }
    if (name == "counter") {
      std::optional<YoungFunction> A;
      if (kv.count("A")) A = parse_young(kv["A"]);
      return Kernel::counterexample(num(kv, "r", 2.0), num(kv, "beta", 1.0), num(kv, "eta", 4.0), dim, A);
    }
    if (name == "matrix") {
      std::string path = kv.count("path") ? kv["path"] : (positional.empty() ? "" : positional[0]);
      auto v = read_numbers(resolve(path));
      auto n = static_cast<size_t>(std::llround(std::sqrt(static_cast<double>(v.size()))));
      return Kernel::matrix(std::move(v), n, dim);
    }
    throw std::invalid_argument("unknown kernel '" + name + "'");
  }();
  return k;
}

}  // namespace hlab
