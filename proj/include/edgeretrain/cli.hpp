#ifndef EDGERETRAIN_CLI_HPP_
#define EDGERETRAIN_CLI_HPP_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "edgeretrain/scenario.hpp"

namespace edgeretrain {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitInfeasible = 2;

inline constexpr const char* kOutDirEnv = "EDGERETRAIN_OUT_DIR";

// --out, else $EDGERETRAIN_OUT_DIR, else ./out.
std::filesystem::path resolve_out_dir(const std::optional<std::string>& flag);

struct RunOptions {
  std::filesystem::path scenario;
  std::optional<SchemeKind> scheme;
  std::optional<std::uint64_t> seed;
  bool literal_utility = false;
  std::filesystem::path out_dir;
};

struct CompareOptions {
  std::filesystem::path scenario;
  std::vector<std::uint64_t> seeds;
  bool literal_utility = false;
  std::filesystem::path out_dir;
};

struct SweepOptions {
  std::filesystem::path scenario;
  std::vector<double> up_levels;
  std::vector<std::uint64_t> seeds;
  bool literal_utility = false;
  std::filesystem::path out_dir;
};

struct BenchOptions {
  std::string grid = "20x20x3";
  int instances = 200;
  std::uint64_t seed = 1;
  int max_iter = 500;
  int max_fail = 50;
  std::filesystem::path out_dir;
};

// Each command writes its files under out_dir, prints a short summary to
// `out`, diagnostics to `err`, and returns an exit code.
int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_compare(const CompareOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep_bandwidth(const SweepOptions& opts, std::ostream& out, std::ostream& err);
int cmd_bench_planner(const BenchOptions& opts, std::ostream& out, std::ostream& err);

int cli_main(int argc, char** argv);

}  // namespace edgeretrain

#endif  // EDGERETRAIN_CLI_HPP_
