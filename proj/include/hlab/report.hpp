#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

namespace hlab {

using ojson = nlohmann::ordered_json;

struct Assertion {
  std::string name;
  double value = 0.0;
  double bound = 0.0;
  std::string relation;  // "<=", ">=", "<", ">", "=="
  bool pass = false;
};

struct PlotRow {
  double lambda = 0.0, lhs = 0.0, rhs = 0.0, ratio = 0.0;
};

struct Report {
  std::string name;
  std::string kind;
  uint64_t hash = 0;
  ojson echo = ojson::object();
  ojson constants = ojson::object();  // every constant used, fitted or computed
  ojson rows = ojson::array();        // per level / per case
  std::vector<Assertion> assertions;
  std::vector<std::string> verdicts;
  std::vector<PlotRow> plot;
  std::optional<std::string> family;                   // family.json contents
  std::vector<std::vector<std::string>> constants_csv;  // object, constant, value

  // Records and returns the outcome.
  bool check(const std::string& name, double value, const std::string& rel, double bound);
  bool pass() const;
};

ojson to_json(const Report& r);
std::string plot_csv(const std::vector<PlotRow>& rows);

// Writes report.json, plot.csv and, when present, family.json and constants.csv.
// Each file goes through a temporary and a rename.
void write_outputs(const Report& r, const std::string& dir);
void write_atomic(const std::string& path, const std::string& bytes);

std::string fmt_double(double v);

}  // namespace hlab
