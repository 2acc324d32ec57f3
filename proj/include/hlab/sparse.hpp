#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "hlab/dyadic.hpp"
#include "hlab/grid.hpp"
#include "hlab/operators.hpp"
#include "hlab/young.hpp"

namespace hlab {

struct EngineOptions {
  int max_depth = -1;       // -1: grid level + 1
  int64_t node_budget = 100000;
  std::optional<double> c_t;  // computed as H + ||T||_2 when absent
  HormanderOptions hormander{};
  int power_iterations = 50;
  double alpha_cap = 0x1p60;
};

struct NodeStats {
  Cube cube;
  int depth = 0;
  double alpha = 0.0;
  double e_fraction = 0.0;      // |E| / |Q|
  double child_fraction = 0.0;  // sum |P_j| / |Q|
};

struct SparseForm {
  Grid grid;
  int m = 0;
  YoungFunction A = YoungFunction::power(1.0);
  SparseFamily family;
  std::vector<std::vector<double>> coef;  // coef[i][h] = || f chi_3Q |b - b_3Q|^h ||_{A,3Q}
  std::vector<double> center;             // b_{3Q}
  std::vector<NodeStats> nodes;           // aligned with family.cubes
  bool partial = false;
  double c_t = 0.0;
  double hormander = 0.0;
  double l2 = 0.0;
};

// Constants entering the stopping thresholds: H estimate with the conjugate of A, and ||T||_2.
struct OperatorConstants {
  double hormander = 0.0;
  double l2 = 0.0;
  double c_t() const { return hormander + l2; }
};
OperatorConstants operator_constants(const DiscreteOperator& op, const YoungFunction& A, const EngineOptions& opt = {});

// Cells of Q0 in E = union of E_h at the given alpha.
std::vector<int64_t> exceptional_set(const DiscreteOperator& op, const GridFunction& f, const GridFunction& b, int h,
                                     const Cube& q0, double alpha, const YoungFunction& A, double c_t);

SparseForm build_sparse_family(const DiscreteOperator& op, const GridFunction& b, int m, const YoungFunction& A,
                               const GridFunction& f, const Cube& q0, const EngineOptions& opt = {});

struct FormValues {
  std::vector<GridFunction> per_h;  // A^{m,h}
  GridFunction total;               // sum_h binom(m,h) A^{m,h}
};

FormValues sparse_form_eval(const SparseForm& form, const GridFunction& b);

// Number of family cubes containing each cell.
GridFunction counting_function(const SparseForm& form);

struct DominationReport {
  double c_star = 0.0;
  int64_t violations = 0;
  std::vector<int64_t> violation_cells;
  GridFunction lhs, total, ratio;
  std::vector<int64_t> histogram;  // ratio / c_star in 10 equal bins over [0, 1]
  SparseForm form;
  bool sparse_ok = false;
  std::string sparse_diagnostic;
};

DominationReport domination_report(const DiscreteOperator& op, const GridFunction& b, int m, const YoungFunction& A,
                                   const GridFunction& f, const Cube& q0, const EngineOptions& opt = {});

// Cube literals with coefficients and E_Q cell lists.
std::string family_json(const SparseForm& form, bool with_sets = true);

}  // namespace hlab
