// lab: scenario runner for the inequality battery
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "hlab/checks.hpp"
#include "hlab/parallel.hpp"
#include "hlab/report.hpp"
#include "hlab/scenario.hpp"

namespace fs = std::filesystem;
using namespace hlab;

namespace {

struct Flags {
  std::optional<int> level;
  std::string out = "lab_out";
  uint64_t seed = 1;
};

Scenario load(const std::string& path, const Flags& fl) {
  Scenario s = load_scenario(path);
  s.level_override = fl.level;
  s.seed = fl.seed;
  return s;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void print_line(const Report& r, double secs) {
  std::printf("%-28s %-15s %s  (%.2f s)\n", r.name.c_str(), r.kind.c_str(), r.pass() ? "PASS" : "FAIL", secs);
  for (const auto& a : r.assertions)
    if (!a.pass)
      std::printf("    failed: %s: %s %s %s\n", a.name.c_str(), fmt_double(a.value).c_str(), a.relation.c_str(),
                  fmt_double(a.bound).c_str());
  for (const auto& v : r.verdicts) std::printf("    note: %s\n", v.c_str());
}

int run_one(const std::string& path, const Flags& fl, const std::string& kind_override, const std::string& family_out) {
  auto t0 = std::chrono::steady_clock::now();
  Scenario s = load(path, fl);
  if (!kind_override.empty()) s.kind = kind_override;
  Report r = run_scenario(s);
  write_outputs(r, fl.out);
  if (!family_out.empty()) {
    if (!r.family) throw ConfigError("scenario produced no sparse family");
    write_atomic(family_out, *r.family + "\n");
  }
  print_line(r, seconds_since(t0));
  return r.pass() ? 0 : 1;
}

int run_battery(const std::string& dir, const Flags& fl) {
  auto files = battery_files(dir);
  ojson summary;
  summary["scenarios"] = ojson::array();
  int code = 0;
  uint64_t h = 1469598103934665603ull;
  for (const auto& path : files) {
    auto t0 = std::chrono::steady_clock::now();
    ojson item;
    item["file"] = fs::path(path).filename().string();
    try {
      Scenario s = load(path, fl);
      h = (h ^ s.hash) * 1099511628211ull;
      Report r = run_scenario(s);
      write_outputs(r, (fs::path(fl.out) / r.name).string());
      item["name"] = r.name;
      item["kind"] = r.kind;
      item["pass"] = r.pass();
      print_line(r, seconds_since(t0));
      if (!r.pass() && code == 0) code = 1;
    } catch (const ConfigError& e) {
      item["error"] = e.what();
      std::printf("%-28s config error: %s\n", item["file"].get<std::string>().c_str(), e.what());
      code = 2;
    } catch (const std::exception& e) {
      item["error"] = e.what();
      std::printf("%-28s error: %s\n", item["file"].get<std::string>().c_str(), e.what());
      if (code == 0) code = 1;
    }
    summary["scenarios"].push_back(std::move(item));
  }
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  summary["battery_hash"] = buf;
  summary["pass"] = code == 0;
  fs::create_directories(fl.out);
  write_atomic((fs::path(fl.out) / "battery.json").string(), summary.dump(1) + "\n");
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"weighted inequality lab"};
  app.require_subcommand(1);
  Flags fl;
  int level = -1;
  auto add_flags = [&](CLI::App* c) {
    c->add_option("--level", level, "run a single grid level");
    c->add_option("--out", fl.out, "output directory");
    c->add_option("--seed", fl.seed, "seed for sampled Hormander pairs");
  };
  std::string path, family_out;
  auto* run = app.add_subcommand("run", "run one scenario");
  run->add_option("scenario", path)->required();
  add_flags(run);
  auto* bat = app.add_subcommand("battery", "run every scenario of a directory");
  bat->add_option("dir", path)->required();
  add_flags(bat);
  auto* con = app.add_subcommand("constants", "tabulate the constants of a scenario");
  con->add_option("scenario", path)->required();
  add_flags(con);
  auto* sp = app.add_subcommand("sparse", "build the sparse family of a scenario");
  sp->add_option("scenario", path)->required();
  sp->add_option("--dump-family", family_out, "write family.json here");
  add_flags(sp);

  CLI11_PARSE(app, argc, argv);
  if (level >= 0) fl.level = level;
  const int threads = configure_threads_from_env();
  std::fprintf(stderr, "threads: %d\n", threads);
  try {
    if (*run) return run_one(path, fl, "", "");
    if (*con) return run_one(path, fl, "constants", "");
    if (*sp) return run_one(path, fl, "sparse", family_out);
    return run_battery(path, fl);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
}
