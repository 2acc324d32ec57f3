#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>

#include <sys/wait.h>

#include <json.hpp>

#include "hlab/report.hpp"
#include "hlab/scenario.hpp"

namespace fs = std::filesystem;
using namespace hlab;

namespace {

fs::path scratch(const std::string& name) {
  fs::path p = fs::temp_directory_path() / ("hlab_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int lab(const std::string& args) {
  std::string cmd = std::string(LAB_BIN) + " " + args + " >/dev/null 2>&1";
  int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

void write(const fs::path& p, const std::string& s) { std::ofstream(p) << s; }

}  // namespace

TEST_CASE("empty battery") {
  auto d = scratch("empty");
  fs::create_directories(d / "in");
  CHECK(lab("battery " + (d / "in").string() + " --out " + (d / "out").string()) == 0);
  auto j = nlohmann::json::parse(std::ifstream(d / "out" / "battery.json"));
  CHECK(j["scenarios"].empty());
  CHECK(j["pass"] == true);
}

TEST_CASE("parse errors carry the line") {
  auto d = scratch("parse");
  write(d / "bad.ini", "[scenario]\nkind = cf\nthis line is broken\n");
  try {
    load_scenario((d / "bad.ini").string());
    FAIL("no throw");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find(":3:") != std::string::npos);
  }
  CHECK(lab("run " + (d / "bad.ini").string() + " --out " + (d / "o").string()) == 2);
}

TEST_CASE("bad Young expression exits with a config error") {
  auto d = scratch("young");
  write(d / "y.ini", "[scenario]\nkind = constants\nyoung = powr(2)\nlevels = 4\n");
  CHECK(lab("run " + (d / "y.ini").string() + " --out " + (d / "o").string()) == 2);
}

TEST_CASE("counterexample domain") {
  auto d = scratch("domain");
  write(d / "c.ini", "[scenario]\nkind = counterexample\nr = 2\np = 3\ngamma = 0.75\nbeta = 1\n");
  CHECK(lab("run " + (d / "c.ini").string() + " --out " + (d / "o").string()) == 2);
}

TEST_CASE("single scenario outputs") {
  auto d = scratch("run");
  fs::path src = fs::path(SOURCE_DIR) / "battery" / "constants.ini";
  CHECK(lab("run " + src.string() + " --out " + d.string()) == 0);
  auto j = nlohmann::json::parse(std::ifstream(d / "report.json"));
  CHECK(j["pass"] == true);
  CHECK(fs::exists(d / "constants.csv"));
  CHECK(fs::exists(d / "plot.csv"));
}

TEST_CASE("atomic writes leave no temporaries") {
  auto d = scratch("atomic");
  write_atomic((d / "x.txt").string(), "abc");
  CHECK(fs::exists(d / "x.txt"));
  CHECK_FALSE(fs::exists(d / "x.txt.tmp"));
}
