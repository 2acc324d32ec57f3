#pragma once

#include <array>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "hlab/young.hpp"

namespace hlab {

enum class KernelFamily { Hilbert, DiniCZ, Homogeneous, Counterexample, Matrix, Generic };

using Point = std::array<double, 2>;

struct KernelInfo {
  KernelFamily family = KernelFamily::Generic;
  int dim = 1;
  bool singular = false;     // diagonal cell excluded
  bool convolution = false;  // K(x,y) = k(x - y)
  std::string spec;
  // family parameters
  double ck = 1.0;
  double delta = 0.0;  // Dini modulus exponent
  double r = 2.0, beta = 1.0;
  Point eta{0.0, 0.0};
};

class Kernel {
 public:
  struct Impl;

  static Kernel hilbert();
  // c_K sign-type odd kernel with modulus t^delta; dimension 1 or 2.
  static Kernel dini(double delta, double ck = 1.0, int dim = 1);
  // Omega sampled at equally spaced angles 2 pi k / M on the circle.
  static Kernel homogeneous(std::vector<double> omega_samples);
  // k(|x - y - eta|); A defaults to the tabulated function with inverse u^{1/r}/log(e+u)^{(1+beta)/2}.
  static Kernel counterexample(double r, double beta, double eta, int dim = 1,
                               std::optional<YoungFunction> A = std::nullopt);
  // Kernel values K(x_i, y_j) at cell centers of a fixed grid, row-major n x n.
  static Kernel matrix(std::vector<double> values, size_t n, int dim = 1);
  static Kernel generic(std::function<double(Point, Point)> fn, int dim = 1);

  double operator()(Point x, Point y) const;
  // Integral of k over the box of side h centered at displacement s = x - y (convolution kernels).
  double cell_integral(Point s, double h) const;

  const KernelInfo& info() const;
  // Counterexample profile k(t) and its Young function.
  double profile(double t) const;
  const YoungFunction& young() const;
  // Homogeneous kernels: angular samples.
  const std::vector<double>& omega() const;
  const std::vector<double>& matrix_values() const;

 private:
  explicit Kernel(std::shared_ptr<const Impl> p) : impl_(std::move(p)) {}
  std::shared_ptr<const Impl> impl_;
};

// Tabulated Young function with A^{-1}(u) = u^{1/r} / log(e+u)^{(1+beta)/2}; convexity is checked.
YoungFunction counterexample_young(double r, double beta);

// hilbert | dini(omega=power(d), ck=..) | homog(omega_table=path | omega=cos | omega=jump)
// counter(r=.., beta=.., eta=..[, A=expr]) | matrix(path)
Kernel make_kernel(const std::string& spec, int dim = 1, const std::string& base_dir = ".");

// Periodic linear interpolation of equally spaced angular samples.
double omega_at(const std::vector<double>& samples, double theta);

}  // namespace hlab
