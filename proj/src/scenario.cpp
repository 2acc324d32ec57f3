#include "hlab/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

namespace hlab {

namespace fs = std::filesystem;
namespace pt = boost::property_tree;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open scenario file " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

pt::ptree parse_ini(const std::string& text, const std::string& path) {
  pt::ptree tree;
  std::istringstream in(text);
  try {
    pt::read_ini(in, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(path + ":" + std::to_string(e.line()) + ": " + e.message());
  }
  return tree;
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* b = v.data();
  const char* e = v.data() + v.size();
  auto [p, ec] = std::from_chars(b, e, out);
  if (ec != std::errc() || p != e) throw ConfigError("key '" + key + "': expected a number, got '" + v + "'");
  return out;
}

std::string trim(const std::string& s) {
  size_t a = s.find_first_not_of(" \t");
  if (a == std::string::npos) return "";
  size_t b = s.find_last_not_of(" \t");
  return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  out.erase(std::remove(out.begin(), out.end(), std::string()), out.end());
  return out;
}

void read_frozen(const pt::ptree& sec, std::map<std::string, double>& into) {
  for (const auto& [k, v] : sec) into[k] = parse_double(k, v.data());
}

}  // namespace

uint64_t fnv1a(const std::string& bytes) {
  uint64_t h = 1469598103934665603ull;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

bool Scenario::has(const std::string& key) const {
  return std::any_of(entries.begin(), entries.end(), [&](const auto& e) { return e.first == key; });
}

std::string Scenario::str(const std::string& key) const {
  for (const auto& [k, v] : entries)
    if (k == key) return v;
  throw ConfigError("scenario '" + name + "': missing key '" + key + "'");
}

std::string Scenario::str(const std::string& key, const std::string& def) const { return has(key) ? str(key) : def; }

double Scenario::num(const std::string& key) const { return parse_double(key, str(key)); }

double Scenario::num(const std::string& key, double def) const { return has(key) ? num(key) : def; }

int Scenario::integer(const std::string& key, int def) const {
  if (!has(key)) return def;
  double v = num(key);
  if (v != static_cast<int>(v)) throw ConfigError("key '" + key + "': expected an integer");
  return static_cast<int>(v);
}

std::vector<int> Scenario::ints(const std::string& key, const std::vector<int>& def) const {
  if (!has(key)) return def;
  std::vector<int> out;
  for (const auto& s : split(str(key), ',')) {
    double v = parse_double(key, s);
    if (v != static_cast<int>(v)) throw ConfigError("key '" + key + "': expected integers");
    out.push_back(static_cast<int>(v));
  }
  if (out.empty()) throw ConfigError("key '" + key + "' is empty");
  return out;
}

std::vector<std::string> Scenario::list(const std::string& key) const {
  auto out = split(str(key), ';');
  if (out.empty()) throw ConfigError("key '" + key + "' is empty");
  return out;
}

double Scenario::frozen_value(const std::string& key) const {
  auto it = frozen.find(key);
  if (it == frozen.end()) throw ConfigError("scenario '" + name + "': no frozen constant '" + key + "'");
  return it->second;
}

std::vector<int> Scenario::levels(const std::vector<int>& def) const {
  if (level_override) return {*level_override};
  auto ls = ints("levels", def);
  for (int l : ls)
    if (l < 2 || l > 14) throw ConfigError("levels must lie in [2, 14]");
  return ls;
}

Grid Scenario::grid(int level) const {
  int dim = integer("dim", 1);
  if (dim != 1 && dim != 2) throw ConfigError("dim must be 1 or 2");
  std::array<double, 2> origin{0.0, 0.0};
  if (has("origin")) {
    auto parts = split(str("origin"), ',');
    if (parts.size() != 1 && static_cast<int>(parts.size()) != dim) throw ConfigError("origin needs dim coordinates");
    for (int a = 0; a < dim; ++a) origin[a] = parse_double("origin", parts[parts.size() == 1 ? 0 : a]);
  }
  double side = num("side", 1.0);
  if (!(side > 0.0)) throw ConfigError("side must be positive");
  return Grid(dim, origin, side, level);
}

Scenario load_scenario(const std::string& path) {
  Scenario s;
  s.path = path;
  s.base_dir = fs::path(path).parent_path().string();
  if (s.base_dir.empty()) s.base_dir = ".";
  const std::string text = read_file(path);
  s.hash = fnv1a(text);
  pt::ptree tree = parse_ini(text, path);
  auto sec = tree.get_child_optional("scenario");
  if (!sec) throw ConfigError(path + ": missing [scenario] section");
  for (const auto& [k, v] : *sec) s.entries.emplace_back(k, v.data());
  s.name = s.str("name", fs::path(path).stem().string());
  s.kind = s.str("kind");
  static const std::vector<std::string> kinds{"strong",         "cf",      "endpoint", "endpoint_czo", "expdecay",
                                              "counterexample", "sparse", "constants"};
  if (std::find(kinds.begin(), kinds.end(), s.kind) == kinds.end())
    throw ConfigError(path + ": unknown kind '" + s.kind + "'");

  fs::path frozen_file = fs::path(s.base_dir) / s.str("frozen", "frozen.ini");
  if (fs::exists(frozen_file)) {
    pt::ptree ft = parse_ini(read_file(frozen_file.string()), frozen_file.string());
    if (auto fsec = ft.get_child_optional(pt::ptree::path_type(s.name, '\0'))) read_frozen(*fsec, s.frozen);
  }
  if (auto own = tree.get_child_optional("frozen")) read_frozen(*own, s.frozen);
  return s;
}

std::vector<std::string> battery_files(const std::string& dir) {
  if (!fs::is_directory(dir)) throw ConfigError("not a directory: " + dir);
  std::vector<std::string> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (!e.is_regular_file() || e.path().extension() != ".ini") continue;
    if (e.path().filename() == "frozen.ini") continue;
    out.push_back(e.path().string());
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace hlab
