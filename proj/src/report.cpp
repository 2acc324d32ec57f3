#include "hlab/report.hpp"

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hlab {

namespace fs = std::filesystem;

bool Report::check(const std::string& n, double value, const std::string& rel, double bound) {
  bool ok = false;
  if (rel == "<=") ok = value <= bound;
  else if (rel == ">=") ok = value >= bound;
  else if (rel == "<") ok = value < bound;
  else if (rel == ">") ok = value > bound;
  else if (rel == "==") ok = value == bound;
  else throw std::invalid_argument("unknown relation " + rel);
  assertions.push_back({n, value, bound, rel, ok});
  return ok;
}

bool Report::pass() const {
  for (const auto& a : assertions)
    if (!a.pass) return false;
  return true;
}

namespace {

// JSON has no inf/nan; keep them readable as strings.
ojson num(double v) {
  if (std::isfinite(v)) return v;
  if (std::isnan(v)) return "nan";
  return v > 0 ? "inf" : "-inf";
}

}  // namespace

ojson to_json(const Report& r) {
  ojson j;
  j["name"] = r.name;
  j["kind"] = r.kind;
  char h[32];
  std::snprintf(h, sizeof h, "%016llx", static_cast<unsigned long long>(r.hash));
  j["scenario_hash"] = h;
  j["pass"] = r.pass();
  j["scenario"] = r.echo;
  j["constants"] = r.constants;
  j["rows"] = r.rows;
  auto as = ojson::array();
  for (const auto& a : r.assertions) {
    ojson x;
    x["name"] = a.name;
    x["value"] = num(a.value);
    x["relation"] = a.relation;
    x["bound"] = num(a.bound);
    x["pass"] = a.pass;
    as.push_back(std::move(x));
  }
  j["assertions"] = std::move(as);
  j["verdicts"] = r.verdicts;
  return j;
}

std::string fmt_double(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string plot_csv(const std::vector<PlotRow>& rows) {
  std::string s = "lambda,lhs,rhs,ratio\n";
  for (const auto& r : rows)
    s += fmt_double(r.lambda) + "," + fmt_double(r.lhs) + "," + fmt_double(r.rhs) + "," + fmt_double(r.ratio) + "\n";
  return s;
}

void write_atomic(const std::string& path, const std::string& bytes) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp);
    out << bytes;
    if (!out) throw std::runtime_error("write failed: " + tmp);
  }
  fs::rename(tmp, path);
}

void write_outputs(const Report& r, const std::string& dir) {
  fs::create_directories(dir);
  write_atomic((fs::path(dir) / "report.json").string(), to_json(r).dump(1) + "\n");
  write_atomic((fs::path(dir) / "plot.csv").string(), plot_csv(r.plot));
  if (r.family) write_atomic((fs::path(dir) / "family.json").string(), *r.family + "\n");
  if (!r.constants_csv.empty()) {
    std::string s = "object,constant,value\n";
    for (const auto& row : r.constants_csv) {
      for (size_t i = 0; i < row.size(); ++i) {
        const bool quote = row[i].find_first_of(",\"") != std::string::npos;
        std::string cell = row[i];
        if (quote) {
          std::string q = "\"";
          for (char c : cell) q += c == '"' ? std::string("\"\"") : std::string(1, c);
          cell = q + "\"";
        }
        s += (i ? "," : "") + cell;
      }
      s += "\n";
    }
    write_atomic((fs::path(dir) / "constants.csv").string(), s);
  }
}

}  // namespace hlab
