#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "walklab/error.hpp"
#include "walklab/harness.hpp"

using namespace walklab;
namespace fs = std::filesystem;
using nlohmann::json;

namespace {

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("walklab_harness_" + name);
  fs::remove_all(p);
  return p;
}

std::string config_error(const json& cfg) {
  try {
    validate_config(cfg);
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kConfigInvalid);
    return e.what();
  }
  return "";
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const std::string cmd = std::string(WALKLAB_CLI) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("hashes and number formatting") {
  CHECK(fnv1a("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a("") == 0xcbf29ce484222325ULL);
  CHECK(hex64(0xabcULL) == "0000000000000abc");
  CHECK(format_double(0.1) == "0.10000000000000001");
  CHECK(format_double(2) == "2");
  CHECK(format_double(INFINITY) == "inf");
}

TEST_CASE("config errors name the offending field") {
  CHECK(config_error({{"experiment", "ball"}, {"group", "nope"}, {"radius", 3}}).find("/group") != std::string::npos);
  CHECK(config_error({{"experiment", "ball"}, {"group", "z:1"}, {"radius", 3}, {"extra", 1}}).find("/extra") !=
        std::string::npos);
  CHECK(config_error({{"experiment", "ball"}, {"group", "z:1"}}).find("/radius") != std::string::npos);
  CHECK(config_error({{"experiment", "teleport"}}).find("/experiment") != std::string::npos);
  CHECK(config_error({{"experiment", "regularity"}, {"function", {{"power_log", {{"a", 1}, {"z", 2}}}}}, {"doubling", json::object()}})
            .find("/function/power_log/z") != std::string::npos);
  CHECK(config_error({{"experiment", "ball"}, {"group", "z:1"}, {"radius", 3}}).empty());
}

TEST_CASE("a ball run writes its outputs and a manifest") {
  const auto dir = scratch("ball");
  auto res = run_experiment({{"experiment", "ball"}, {"group", "zd:2"}, {"radius", 4}}, dir, 1);
  CHECK(res.exit_code == 0);
  CHECK(fs::exists(dir / "ball.wlb"));
  CHECK(fs::exists(dir / "growth.csv"));
  const auto manifest = json::parse(slurp(dir / "manifest.json"));
  CHECK(manifest["outputs"]["growth.csv"] == hex64(fnv1a_file(dir / "growth.csv")));
  CHECK(manifest["version"] == kVersion);
  CHECK(slurp(dir / "growth.csv").find("4,41") != std::string::npos);
  fs::remove_all(dir);
}

TEST_CASE("report needs known inputs") {
  const auto dir = scratch("empty");
  fs::create_directories(dir);
  try {
    (void)build_report(dir);
    FAIL("expected MISSING_INPUT");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::kMissingInput);
  }
  (void)run_experiment({{"experiment", "bound"}, {"phi", "z:phi"}, {"lambda", "z:lambda"}, {"group", "z:1"},
                        {"k", {64, 256}}, {"r", {1}}},
                       dir, 1);
  auto rep = build_report(dir);
  CHECK(rep.rows == 2);
  CHECK(fs::exists(rep.report_csv));
  // runs kept in subdirectories are picked up; the previous report is not
  (void)run_experiment({{"experiment", "walk"}, {"group", "z:1"}, {"radius", 20}, {"k", {4, 8}}, {"r", {1}}},
                       dir / "runs" / "walk", 1);
  rep = build_report(dir);
  CHECK(rep.rows == 4);
  const std::string all = slurp(rep.report_csv);
  CHECK(all.find("runs/walk/walk.csv,small_ball_r1,4,") != std::string::npos);
  CHECK(fs::exists(dir / "report" / "series" / "runs_walk_walk_small_ball_r1.csv"));
  fs::remove_all(dir);
}

TEST_CASE("example configs reproduce the golden outputs at any worker count") {
  const fs::path src = WALKLAB_SOURCE_DIR;
  int checked = 0;
  for (const auto& entry : fs::directory_iterator(src / "configs")) {
    if (entry.path().extension() != ".json") continue;
    const std::string name = entry.path().stem().string();
    const auto golden = json::parse(slurp(src / "tests" / "golden" / (name + ".json")));
    const auto cfg = json::parse(slurp(entry.path()));
    for (int workers : {1, 3}) {
      const auto dir = scratch(name);
      (void)run_experiment(cfg, dir, workers);
      for (const auto& [file, hash] : golden.items()) {
        INFO(name << "/" << file << " workers=" << workers);
        CHECK(hex64(fnv1a_file(dir / file)) == hash.get<std::string>());
      }
      fs::remove_all(dir);
    }
    ++checked;
  }
  CHECK(checked >= 8);
}

TEST_CASE("command line exit codes") {
  const auto dir = scratch("cli");
  const std::string src = WALKLAB_SOURCE_DIR;
  CHECK(run_cli("ball --group z:1 --radius 3 --out " + dir.string()) == 0);
  CHECK(run_cli("ball --group nope --radius 3 --out " + dir.string()) == 1);
  CHECK(run_cli("report " + (dir / "missing").string()) == 1);
  // vacuous instances are a soft flag
  CHECK(run_cli("prooflab chain-bound --seed 1 --size 6 --trials 3 --out " + dir.string()) == 2);
  CHECK(run_cli("run " + src + "/configs/walk_z.json --out " + (dir / "w").string()) == 0);
  CHECK(fs::exists(dir / "w" / "walk.csv"));
  CHECK(run_cli("report " + dir.string()) == 0);
  fs::remove_all(dir);
}
