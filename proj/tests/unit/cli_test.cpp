#include <gtest/gtest.h>

#include <unistd.h>

#include <algorithm>
#include <cstdlib>
#include <set>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "edgeretrain/cli.hpp"

using namespace edgeretrain;
namespace fs = std::filesystem;

namespace {

const fs::path kScenarioDir = EDGERETRAIN_SCENARIO_DIR;

fs::path fresh_dir(const std::string& name) {
  const auto d = fs::temp_directory_path() / ("edgeretrain_cli_" + name + "_" + std::to_string(::getpid()));
  fs::remove_all(d);
  fs::create_directories(d);
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

int count_lines(const std::string& text) { return static_cast<int>(std::count(text.begin(), text.end(), '\n')); }

int invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "edgeretrain");
  std::vector<char*> argv;
  for (auto& a : args) argv.push_back(a.data());
  return cli_main(static_cast<int>(argv.size()), argv.data());
}

}  // namespace

TEST(Cli, RunNoRetrainingReportsZero) {
  const auto dir = fresh_dir("nr");
  std::ostringstream out, err;
  RunOptions o;
  o.scenario = kScenarioDir / "adverse.json";
  o.scheme = SchemeKind::kNR;
  o.seed = 1;
  o.out_dir = dir;
  EXPECT_EQ(cmd_run(o, out, err), kExitOk);
  EXPECT_NE(out.str().find("retrainings=0"), std::string::npos) << out.str();
  for (const char* f : {"events.ndjson", "windows.csv", "retrainings.csv", "summary.json"}) {
    EXPECT_TRUE(fs::exists(dir / f)) << f;
  }
}

TEST(Cli, MissingScenarioNamesPath) {
  std::ostringstream out, err;
  RunOptions o;
  o.scenario = "/no/such/scenario.json";
  o.out_dir = fresh_dir("missing");
  EXPECT_EQ(cmd_run(o, out, err), kExitValidation);
  EXPECT_NE(err.str().find("/no/such/scenario.json"), std::string::npos) << err.str();
  EXPECT_EQ(invoke({"run", "--scenario", "/no/such/scenario.json", "--out", o.out_dir.string()}), kExitValidation);
}

TEST(Cli, SameSeedSameBytes) {
  const auto a = fresh_dir("det_a");
  const auto b = fresh_dir("det_b");
  for (const auto& d : {a, b}) {
    std::ostringstream out, err;
    RunOptions o;
    o.scenario = kScenarioDir / "adverse.json";
    o.seed = 4;
    o.out_dir = d;
    ASSERT_NE(cmd_run(o, out, err), kExitValidation) << err.str();
  }
  for (const char* f : {"events.ndjson", "windows.csv", "retrainings.csv", "summary.json"}) {
    EXPECT_EQ(slurp(a / f), slurp(b / f)) << f;
  }
}

TEST(Cli, InfeasiblePlansGiveExitTwo) {
  const auto dir = fresh_dir("infeasible");
  std::ofstream(dir / "tight.json") << R"({"tau0_s": 0.5, "env_timeline": [
    {"label":"normal","start_s":0,"end_s":170,"difficulty":0.1,"false_positive_rate":0.01},
    {"label":"heavy_snow","start_s":170,"end_s":400,"difficulty":0.5,"false_positive_rate":0.02}]})";
  std::ostringstream out, err;
  RunOptions o;
  o.scenario = dir / "tight.json";
  o.out_dir = dir;
  EXPECT_EQ(cmd_run(o, out, err), kExitInfeasible);
}

TEST(Cli, CompareOneRowPerSchemeMetric) {
  const auto dir = fresh_dir("compare");
  std::ostringstream out, err;
  CompareOptions o;
  o.scenario = kScenarioDir / "adverse.json";
  o.seeds = {1, 2};
  o.out_dir = dir;
  ASSERT_EQ(cmd_compare(o, out, err), kExitOk) << err.str();
  const auto table = slurp(dir / "compare_table.csv");
  std::istringstream in(table);
  std::string line;
  std::getline(in, line);
  std::set<std::pair<std::string, std::string>> keys;
  int rows = 0;
  while (std::getline(in, line)) {
    std::istringstream row(line);
    std::string scheme, metric, mean, sd, seeds;
    std::getline(row, scheme, ',');
    std::getline(row, metric, ',');
    std::getline(row, mean, ',');
    std::getline(row, sd, ',');
    std::getline(row, seeds, ',');
    EXPECT_EQ(seeds, "2");
    keys.insert({scheme, metric});
    ++rows;
  }
  EXPECT_EQ(static_cast<int>(keys.size()), rows);
  EXPECT_EQ(rows % 5, 0);
  EXPECT_EQ(count_lines(slurp(dir / "runs.csv")), 1 + 5 * 2);
}

TEST(Cli, SweepNeedsTwoLevels) {
  const auto dir = fresh_dir("sweep");
  std::ostringstream out, err;
  SweepOptions o;
  o.scenario = kScenarioDir / "adverse.json";
  o.up_levels = {2.0};
  o.seeds = {1};
  o.out_dir = dir;
  EXPECT_EQ(cmd_sweep_bandwidth(o, out, err), kExitValidation);
  o.up_levels = {2.0, 0.5};
  EXPECT_EQ(cmd_sweep_bandwidth(o, out, err), kExitOk) << err.str();
  EXPECT_EQ(count_lines(slurp(dir / "bandwidth_sweep.csv")), 1 + 5 * 2);
}

TEST(Cli, BenchDegenerateGridIsExact) {
  const auto dir = fresh_dir("bench");
  std::ostringstream out, err;
  BenchOptions o;
  o.grid = "1x1x1";
  o.instances = 10;
  o.out_dir = dir;
  ASSERT_EQ(cmd_bench_planner(o, out, err), kExitOk) << err.str();
  EXPECT_NE(out.str().find("median_ratio=1"), std::string::npos) << out.str();
  std::istringstream in(slurp(dir / "bench_planner.csv"));
  std::string line;
  std::getline(in, line);
  int rows = 0;
  while (std::getline(in, line)) ++rows;
  EXPECT_EQ(rows, 10);
}

TEST(Cli, BenchRejectsOversizedGrid) {
  std::ostringstream out, err;
  BenchOptions o;
  o.grid = "100000x100000x3";
  o.out_dir = fresh_dir("bench_big");
  EXPECT_EQ(cmd_bench_planner(o, out, err), kExitValidation);
  o.grid = "nonsense";
  EXPECT_EQ(cmd_bench_planner(o, out, err), kExitValidation);
}

TEST(Cli, UnknownSchemeIsValidationError) {
  EXPECT_EQ(invoke({"run", "--scenario", (kScenarioDir / "adverse.json").string(), "--scheme", "Bogus", "--out",
                    fresh_dir("bogus").string()}),
            kExitValidation);
}

TEST(Cli, OutDirResolution) {
  EXPECT_EQ(resolve_out_dir(std::string("x")), fs::path("x"));
  ::setenv(kOutDirEnv, "/tmp/from_env", 1);
  EXPECT_EQ(resolve_out_dir(std::nullopt), fs::path("/tmp/from_env"));
  ::unsetenv(kOutDirEnv);
  EXPECT_EQ(resolve_out_dir(std::nullopt), fs::path("out"));
}
