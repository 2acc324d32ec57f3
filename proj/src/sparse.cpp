#include "hlab/sparse.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "hlab/orlicz.hpp"

namespace hlab {

namespace {

double binom(int m, int h) {
  double r = 1.0;
  for (int i = 1; i <= h; ++i) r = r * (m - h + i) / i;
  return r;
}

bool is_power_one(const YoungFunction& A) {
  return A.family() == YoungFamily::Power && A.params()[0] == 1.0;
}

GridFunction restrict_to(const GridFunction& f, const Box& cells) {
  GridFunction out(f.grid, 0.0);
  for (int64_t c : box_cell_list(f.grid, cells)) out.values[c] = f.values[c];
  return out;
}

double box_average(const GridFunction& f, const Box& cells) {
  double s = 0.0;
  auto list = box_cell_list(f.grid, cells);
  for (int64_t c : list) s += f.values[c];
  return s / static_cast<double>(list.size());
}

struct NodeData {
  double center = 0.0;
  std::vector<double> norm;        // per h
  std::vector<GridFunction> g;     // (b - c)^h f chi_3Q
  std::vector<GridFunction> mt;    // grand maximal truncated of g_h on Q
};

NodeData node_data(const DiscreteOperator& op, const GridFunction& f, const GridFunction& b, int hmin, int hmax,
                   const Cube& q, const YoungFunction& A) {
  const Grid& g = op.grid();
  const Box r3 = clip_cells(g, dilate_cells(g, q, 3));
  NodeData d;
  d.center = box_average(b, r3);
  GridFunction fq = restrict_to(f, r3);
  for (int h = hmin; h <= hmax; ++h) {
    GridFunction gh = fq;
    if (h > 0)
      for (int64_t c : box_cell_list(g, r3)) gh.values[c] *= std::pow(b.values[c] - d.center, h);
    double nrm = luxemburg_norm_box(gh, r3, A);
    d.norm.push_back(nrm);
    d.mt.push_back(nrm > 0.0 ? grand_maximal_truncated(op, gh, q) : GridFunction(g, 0.0));
    d.g.push_back(std::move(gh));
  }
  return d;
}

// Cells of q in E at a given alpha.
std::vector<int64_t> collect_e(const Grid& g, const NodeData& d, const Cube& q, double alpha, double c_t) {
  std::vector<int64_t> out;
  for (int64_t c : box_cell_list(g, cube_cells(g, q))) {
    bool in = false;
    for (size_t h = 0; h < d.norm.size() && !in; ++h) {
      const double n = d.norm[h];
      if (!(n > 0.0)) continue;
      in = std::abs(d.g[h].values[c]) > alpha * n || d.mt[h].values[c] > alpha * c_t * n;
    }
    if (in) out.push_back(c);
  }
  return out;
}

}  // namespace

OperatorConstants operator_constants(const DiscreteOperator& op, const YoungFunction& A, const EngineOptions& opt) {
  OperatorConstants k;
  if (is_power_one(A)) {
    k.hormander = hormander_estimate(op, nullptr, opt.hormander).value;
  } else {
    YoungFunction abar = complementary(A);
    k.hormander = hormander_estimate(op, &abar, opt.hormander).value;
  }
  k.l2 = l2_norm_estimate(op, opt.power_iterations);
  return k;
}

std::vector<int64_t> exceptional_set(const DiscreteOperator& op, const GridFunction& f, const GridFunction& b, int h,
                                     const Cube& q0, double alpha, const YoungFunction& A, double c_t) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  NodeData d = node_data(op, f, b, h, h, q0, A);
  return collect_e(op.grid(), d, q0, alpha, c_t);
}

SparseForm build_sparse_family(const DiscreteOperator& op, const GridFunction& b, int m, const YoungFunction& A,
                               const GridFunction& f, const Cube& q0, const EngineOptions& opt) {
  const Grid& g = op.grid();
  if (m < 0 || m > 4) throw std::invalid_argument("commutator order must lie in [0,4]");
  if (!(f.grid == g) || !(b.grid == g)) throw std::invalid_argument("function and operator grids differ");
  if (q0.lattice != 0) throw std::invalid_argument("engine runs on base lattice cubes");
  SparseForm form;
  form.grid = g;
  form.m = m;
  form.A = A;
  form.family.eta = 0.5;
  if (opt.c_t) {
    form.c_t = *opt.c_t;
  } else {
    auto k = operator_constants(op, A, opt);
    form.hormander = k.hormander;
    form.l2 = k.l2;
    form.c_t = k.c_t();
  }
  const int max_depth = opt.max_depth < 0 ? g.level + 1 : opt.max_depth;
  const double e_budget = 1.0 / std::ldexp(1.0, g.dim + 2);
  const double cz_height = 1.0 / std::ldexp(1.0, g.dim + 1);
  std::vector<std::vector<int64_t>> cert;

  struct Item {
    Cube q;
    int depth;
  };
  std::vector<Item> stack{{q0, 0}};
  while (!stack.empty()) {
    Item it = stack.back();
    stack.pop_back();
    const Cube& q = it.q;
    // f chi_{3Q}: the cube's own data is restricted inside node_data
    NodeData d = node_data(op, f, b, 0, m, q, A);
    const Box qc = cube_cells(g, q);
    const int64_t qcells = qc.volume(g.dim);

    NodeStats st;
    st.cube = q;
    st.depth = it.depth;
    std::vector<int64_t> e;
    double alpha = 1.0;
    for (;; alpha *= 2.0) {
      e = collect_e(g, d, q, alpha, form.c_t);
      if (static_cast<double>(e.size()) <= e_budget * static_cast<double>(qcells)) break;
      if (alpha >= opt.alpha_cap) throw std::runtime_error("alpha search did not reach the measure budget");
    }
    st.alpha = alpha;
    st.e_fraction = static_cast<double>(e.size()) / static_cast<double>(qcells);

    std::vector<Cube> kids;
    if (!e.empty()) {
      GridFunction chi(g, 0.0);
      for (int64_t c : e) chi.values[c] = 1.0;
      kids = cz_decompose(chi, q, cz_height);
    }
    int64_t kid_cells = 0;
    for (const auto& p : kids) {
      Box pc = cube_cells(g, p);
      kid_cells += pc.volume(g.dim);
    }
    st.child_fraction = static_cast<double>(kid_cells) / static_cast<double>(qcells);
    if (2 * kid_cells > qcells) throw std::logic_error("children exceed half of the parent cube");

    std::vector<int64_t> eq;
    {
      std::vector<char> in_kid(static_cast<size_t>(g.cell_count()), 0);
      for (const auto& p : kids)
        for (int64_t c : box_cell_list(g, cube_cells(g, p))) in_kid[c] = 1;
      for (int64_t c : box_cell_list(g, qc))
        if (!in_kid[c]) eq.push_back(c);
    }

    form.family.cubes.push_back(q);
    form.coef.push_back(d.norm);
    form.center.push_back(d.center);
    form.nodes.push_back(st);
    cert.push_back(std::move(eq));

    if (kids.empty()) continue;
    if (it.depth + 1 >= max_depth ||
        static_cast<int64_t>(form.family.cubes.size() + stack.size() + kids.size()) > opt.node_budget) {
      form.partial = true;
      continue;
    }
    std::sort(kids.begin(), kids.end());
    for (auto k = kids.rbegin(); k != kids.rend(); ++k) stack.push_back({*k, it.depth + 1});
  }
  form.family.certificate = std::move(cert);
  return form;
}

FormValues sparse_form_eval(const SparseForm& form, const GridFunction& b) {
  const Grid& g = form.grid;
  if (!(b.grid == g)) throw std::invalid_argument("symbol grid differs from the form grid");
  FormValues out;
  for (int h = 0; h <= form.m; ++h) out.per_h.emplace_back(g, 0.0);
  out.total = GridFunction(g, 0.0);
  for (size_t i = 0; i < form.family.cubes.size(); ++i) {
    const auto cells = box_cell_list(g, cube_cells(g, form.family.cubes[i]));
    const double c = form.center[i];
    for (int h = 0; h <= form.m; ++h) {
      const double k = form.coef[i][h];
      if (k == 0.0) continue;
      auto& v = out.per_h[h].values;
      for (int64_t x : cells) v[x] += std::pow(std::abs(b.values[x] - c), form.m - h) * k;
    }
  }
  for (int h = 0; h <= form.m; ++h) {
    const double w = binom(form.m, h);
    for (size_t x = 0; x < out.total.size(); ++x) out.total.values[x] += w * out.per_h[h].values[x];
  }
  return out;
}

GridFunction counting_function(const SparseForm& form) {
  GridFunction out(form.grid, 0.0);
  for (const auto& q : form.family.cubes)
    for (int64_t x : box_cell_list(form.grid, cube_cells(form.grid, q))) out.values[x] += 1.0;
  return out;
}

DominationReport domination_report(const DiscreteOperator& op, const GridFunction& b, int m, const YoungFunction& A,
                                   const GridFunction& f, const Cube& q0, const EngineOptions& opt) {
  const Grid& g = op.grid();
  DominationReport rep;
  const Box r3 = clip_cells(g, dilate_cells(g, q0, 3));
  GridFunction f3 = restrict_to(f, r3);
  rep.form = build_sparse_family(op, b, m, A, f3, q0, opt);
  auto chk = check_sparse(g, rep.form.family);
  rep.sparse_ok = chk.ok;
  rep.sparse_diagnostic = chk.diagnostic;
  FormValues fv = sparse_form_eval(rep.form, b);
  GridFunction t = commutator_apply(op, b, m, f3);
  rep.lhs = GridFunction(g, 0.0);
  rep.total = GridFunction(g, 0.0);
  rep.ratio = GridFunction(g, 0.0);
  const double tol = 1e-12 * std::max(1.0, t.max_abs());
  for (int64_t c : box_cell_list(g, cube_cells(g, q0))) {
    const double l = std::abs(t.values[c]), s = fv.total.values[c];
    rep.lhs.values[c] = l;
    rep.total.values[c] = s;
    if (s > 0.0) {
      rep.ratio.values[c] = l / s;
      rep.c_star = std::max(rep.c_star, l / s);
    } else if (l > tol) {
      ++rep.violations;
      rep.violation_cells.push_back(c);
    }
  }
  rep.histogram.assign(10, 0);
  if (rep.c_star > 0.0)
    for (int64_t c : box_cell_list(g, cube_cells(g, q0))) {
      if (!(rep.total.values[c] > 0.0)) continue;
      int bin = static_cast<int>(rep.ratio.values[c] / rep.c_star * 10.0);
      ++rep.histogram[std::clamp(bin, 0, 9)];
    }
  return rep;
}

std::string family_json(const SparseForm& form, bool with_sets) {
  nlohmann::ordered_json j;
  j["dim"] = form.grid.dim;
  j["level"] = form.grid.level;
  j["m"] = form.m;
  j["A"] = form.A.to_string();
  j["eta"] = form.family.eta;
  j["partial"] = form.partial;
  j["c_t"] = form.c_t;
  auto arr = nlohmann::ordered_json::array();
  for (size_t i = 0; i < form.family.cubes.size(); ++i) {
    nlohmann::ordered_json q;
    q["cube"] = cube_literal(form.grid, form.family.cubes[i]);
    q["depth"] = form.nodes[i].depth;
    q["alpha"] = form.nodes[i].alpha;
    q["e_fraction"] = form.nodes[i].e_fraction;
    q["child_fraction"] = form.nodes[i].child_fraction;
    q["center"] = form.center[i];
    q["coef"] = form.coef[i];
    if (with_sets && form.family.certificate) q["E"] = (*form.family.certificate)[i];
    arr.push_back(std::move(q));
  }
  j["cubes"] = std::move(arr);
  return j.dump(1);
}

}  // namespace hlab
