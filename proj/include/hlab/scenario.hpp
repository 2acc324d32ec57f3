#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "hlab/grid.hpp"

namespace hlab {

// Bad scenario file or parameter outside its domain. Maps to exit code 2.
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// One INI file: keys of the [scenario] section, plus frozen constants from [frozen]
// and from the section named after the scenario in a sibling frozen.ini.
struct Scenario {
  std::string path;
  std::string base_dir;
  std::string name;
  std::string kind;
  std::vector<std::pair<std::string, std::string>> entries;  // file order
  std::map<std::string, double> frozen;
  uint64_t hash = 0;  // FNV-1a of the file bytes
  std::optional<int> level_override;
  uint64_t seed = 1;

  bool has(const std::string& key) const;
  std::string str(const std::string& key) const;
  std::string str(const std::string& key, const std::string& def) const;
  double num(const std::string& key) const;
  double num(const std::string& key, double def) const;
  int integer(const std::string& key, int def) const;
  std::vector<int> ints(const std::string& key, const std::vector<int>& def) const;
  // ';'-separated list (function literals contain commas)
  std::vector<std::string> list(const std::string& key) const;
  double frozen_value(const std::string& key) const;

  std::vector<int> levels(const std::vector<int>& def) const;
  Grid grid(int level) const;
};

Scenario load_scenario(const std::string& path);

// *.ini files in dir except frozen.ini, sorted by name.
std::vector<std::string> battery_files(const std::string& dir);

uint64_t fnv1a(const std::string& bytes);

}  // namespace hlab
