#include "edgeretrain/cli.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "edgeretrain/bench.hpp"
#include "edgeretrain/metrics.hpp"
#include "edgeretrain/orchestrator.hpp"
#include "edgeretrain/planner.hpp"
#include "edgeretrain/stats.hpp"

namespace edgeretrain {

std::filesystem::path resolve_out_dir(const std::optional<std::string>& flag) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv(kOutDirEnv); env && *env) return env;
  return "out";
}

namespace {

std::ofstream open_out(const std::filesystem::path& dir, const char* name) {
  std::ofstream f(dir / name, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + (dir / name).string());
  return f;
}

ScenarioConfig load_for_cli(const std::filesystem::path& path, bool literal_utility) {
  if (!std::filesystem::exists(path)) throw ScenarioParseError("scenario file not found: " + path.string());
  ScenarioConfig cfg = load_scenario(path);
  if (literal_utility) cfg.utility_mode = UtilityMode::kLiteral;
  return cfg;
}

std::vector<RunMetrics> run_all(const ScenarioConfig& cfg, const std::vector<std::uint64_t>& seeds) {
  std::vector<RunMetrics> runs;
  for (SchemeKind scheme : kAllSchemes) {
    for (std::uint64_t seed : seeds) runs.push_back(compute_metrics(run_scenario(cfg, scheme, seed)));
  }
  return runs;
}

std::vector<SchemeSummary> summarize_all(const std::vector<RunMetrics>& runs) {
  std::vector<SchemeSummary> out;
  for (SchemeKind scheme : kAllSchemes) out.push_back(summarize(scheme, runs));
  return out;
}

template <typename Fn>
int guarded(std::ostream& err, Fn&& body) {
  try {
    return body();
  } catch (const ScenarioParseError& e) {
    err << "error: " << e.what() << '\n';
  } catch (const ScenarioValidationError& e) {
    err << "error: invalid scenario: " << e.what() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
  }
  return kExitValidation;
}

}  // namespace

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    ScenarioConfig cfg = load_for_cli(opts.scenario, opts.literal_utility);
    if (opts.scheme) cfg.scheme = *opts.scheme;
    if (opts.seed) cfg.rng_seed = *opts.seed;

    const RunResult run = run_scenario(cfg);
    const RunMetrics m = compute_metrics(run);

    std::filesystem::create_directories(opts.out_dir);
    {
      auto f = open_out(opts.out_dir, "events.ndjson");
      write_events_ndjson(f, run.log);
    }
    {
      auto f = open_out(opts.out_dir, "windows.csv");
      write_windows_csv(f, run);
    }
    {
      auto f = open_out(opts.out_dir, "retrainings.csv");
      write_retrainings_csv(f, run);
    }
    {
      auto f = open_out(opts.out_dir, "summary.json");
      write_run_summary_json(f, m);
    }

    out << "scheme=" << scheme_name(m.scheme) << " seed=" << m.seed << " mean_f1=" << format_number(m.mean_f1)
        << " std_f1=" << format_number(m.std_f1) << " retrainings=" << m.retrainings
        << " total_retraining_s=" << format_number(m.total_retraining_s) << '\n';
    if (run.infeasible_plans > 0) {
      err << "warning: " << run.infeasible_plans << " retraining plan(s) infeasible; see events.ndjson\n";
      return kExitInfeasible;
    }
    return kExitOk;
  });
}

int cmd_compare(const CompareOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opts.seeds.empty()) throw std::invalid_argument("compare needs at least one seed");
    const ScenarioConfig cfg = load_for_cli(opts.scenario, opts.literal_utility);
    const auto runs = run_all(cfg, opts.seeds);
    const auto summaries = summarize_all(runs);

    std::filesystem::create_directories(opts.out_dir);
    {
      auto f = open_out(opts.out_dir, "runs.csv");
      write_runs_csv(f, runs);
    }
    {
      auto f = open_out(opts.out_dir, "compare_table.csv");
      write_compare_table_csv(f, summaries);
    }
    for (const auto& s : summaries) {
      out << scheme_name(s.scheme) << ": mean_f1=" << format_number(s.mean_f1.mean) << "±"
          << format_number(s.mean_f1.std) << " std_f1=" << format_number(s.std_f1.mean)
          << " retrainings=" << format_number(s.retrainings.mean)
          << " total_retraining_s=" << format_number(s.total_retraining_s.mean) << '\n';
    }
    return kExitOk;
  });
}

int cmd_sweep_bandwidth(const SweepOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (opts.up_levels.size() < 2) throw std::invalid_argument("bandwidth sweep needs at least two levels");
    if (opts.seeds.empty()) throw std::invalid_argument("bandwidth sweep needs at least one seed");
    for (double b : opts.up_levels) {
      if (!(b > 0.0)) throw std::invalid_argument("bandwidth levels must be positive");
    }
    const ScenarioConfig base = load_for_cli(opts.scenario, opts.literal_utility);

    std::map<SchemeKind, std::vector<std::pair<double, Aggregate>>> table;
    for (double level : opts.up_levels) {
      ScenarioConfig cfg = base;
      for (auto& s : cfg.bandwidth_trace) s.up_mbps = level;
      const auto summaries = summarize_all(run_all(cfg, opts.seeds));
      for (const auto& s : summaries) table[s.scheme].emplace_back(level, s.mean_f1);
    }

    std::filesystem::create_directories(opts.out_dir);
    auto f = open_out(opts.out_dir, "bandwidth_sweep.csv");
    f << "scheme,up_mbps,mean_f1,mean_f1_std,drop_from_best_level\n";
    for (SchemeKind scheme : kAllSchemes) {
      const auto& rows = table[scheme];
      double top_level = rows.front().first;
      double top_f1 = rows.front().second.mean;
      for (const auto& [level, agg] : rows) {
        if (level > top_level) {
          top_level = level;
          top_f1 = agg.mean;
        }
      }
      for (const auto& [level, agg] : rows) {
        f << scheme_name(scheme) << ',' << format_number(level) << ',' << format_number(agg.mean) << ','
          << format_number(agg.std) << ',' << format_number(top_f1 - agg.mean) << '\n';
      }
      out << scheme_name(scheme) << ':';
      for (const auto& [level, agg] : rows) out << ' ' << format_number(level) << "->" << format_number(agg.mean);
      out << '\n';
    }
    return kExitOk;
  });
}

int cmd_bench_planner(const BenchOptions& opts, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto grid = parse_grid(opts.grid);
    if (!grid) throw std::invalid_argument("bad grid spec '" + opts.grid + "', expected EPOCHSxFRAMESxTEACHERS");
    if (grid->size() > kBruteForceGridCap) {
      throw std::invalid_argument("grid of " + std::to_string(grid->size()) + " configs exceeds the brute-force cap");
    }
    if (opts.instances < 1) throw std::invalid_argument("need at least one instance");

    std::filesystem::create_directories(opts.out_dir);
    auto f = open_out(opts.out_dir, "bench_planner.csv");
    f << "instance,eta,brute_force_utility,anneal_utility,ratio,anneal_ms,brute_force_ms,iterations\n";

    Rng instance_rng(opts.seed);
    std::vector<double> ratios;
    std::vector<double> anneal_ms;
    for (int i = 0; i < opts.instances; ++i) {
      const PlannerInput in = random_planner_instance(*grid, instance_rng);
      const double eta = urgency(in.trigger_low_conf_count, in.window_frame_count);
      Rng rng(opts.seed * 1000003ULL + static_cast<std::uint64_t>(i));

      const auto t0 = std::chrono::steady_clock::now();
      const auto annealed = anneal_plan(in, eta, rng, opts.max_iter, opts.max_fail);
      const auto t1 = std::chrono::steady_clock::now();
      const auto exact = brute_force_plan(in, eta);
      const auto t2 = std::chrono::steady_clock::now();
      if (!annealed || !exact) throw std::runtime_error("generated instance is infeasible");

      // Ratio of utilities; equal plans count as 1 even when the utility is 0.
      const double ratio = annealed->utility == exact->utility ? 1.0 : annealed->utility / exact->utility;
      const double ms_a = std::chrono::duration<double, std::milli>(t1 - t0).count();
      const double ms_b = std::chrono::duration<double, std::milli>(t2 - t1).count();
      ratios.push_back(ratio);
      anneal_ms.push_back(ms_a);
      f << i << ',' << format_number(eta) << ',' << format_number(exact->utility) << ','
        << format_number(annealed->utility) << ',' << format_number(ratio) << ',' << format_number(ms_a) << ','
        << format_number(ms_b) << ',' << annealed->iterations_used << '\n';
    }
    const auto good = std::count_if(ratios.begin(), ratios.end(), [](double r) { return r >= 0.95; });
    out << "instances=" << opts.instances << " grid=" << opts.grid
        << " median_ratio=" << format_number(percentile(ratios, 0.5))
        << " share_ge_0.95=" << format_number(static_cast<double>(good) / static_cast<double>(ratios.size()))
        << " p99_anneal_ms=" << format_number(percentile(anneal_ms, 0.99)) << '\n';
    return kExitOk;
  });
}

namespace {

std::vector<std::uint64_t> seeds_from(const std::vector<std::uint64_t>& given, std::optional<std::uint64_t> single) {
  if (!given.empty()) return given;
  if (single) return {*single};
  std::vector<std::uint64_t> seeds;
  for (std::uint64_t s = 1; s <= 10; ++s) seeds.push_back(s);
  return seeds;
}

}  // namespace

int cli_main(int argc, char** argv) {
  CLI::App app{"Camera-edge continuous model update simulator"};
  app.require_subcommand(1);

  std::string scenario;
  std::string scheme;
  std::optional<std::uint64_t> seed;
  std::vector<std::uint64_t> seeds;
  std::optional<std::string> out_dir;
  std::vector<double> levels;
  bool literal = false;
  BenchOptions bench;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--out", out_dir, "Output directory (default $EDGERETRAIN_OUT_DIR or ./out)");
    cmd->add_flag("--literal-utility", literal, "Use raw seconds in the utility's latency term");
  };

  auto* run = app.add_subcommand("run", "Run one scenario under one scheme");
  run->add_option("--scenario", scenario, "Scenario file")->required();
  run->add_option("--scheme", scheme, "Proposed, NR, OTR, JIT or Ekya");
  run->add_option("--seed", seed, "Override the scenario seed");
  add_common(run);

  auto* compare = app.add_subcommand("compare", "Run all schemes across seeds");
  compare->add_option("--scenario", scenario, "Scenario file")->required();
  compare->add_option("--seeds", seeds, "Comma-separated seeds (default 1..10)")->delimiter(',');
  compare->add_option("--seed", seed, "Single seed");
  add_common(compare);

  auto* sweep = app.add_subcommand("sweep-bandwidth", "Re-run the comparison at several uplink rates");
  sweep->add_option("--scenario", scenario, "Scenario file")->required();
  sweep->add_option("--bandwidth-levels", levels, "Comma-separated uplink rates in MB/s")
      ->delimiter(',')
      ->required();
  sweep->add_option("--seeds", seeds, "Comma-separated seeds (default 1..10)")->delimiter(',');
  sweep->add_option("--seed", seed, "Single seed");
  add_common(sweep);

  auto* bench_cmd = app.add_subcommand("bench-planner", "Annealing search vs exhaustive search");
  bench_cmd->add_option("--grid", bench.grid, "EPOCHSxFRAMESxTEACHERS")->capture_default_str();
  bench_cmd->add_option("--instances", bench.instances, "Random instances")->capture_default_str();
  bench_cmd->add_option("--seed", bench.seed, "Instance generator seed")->capture_default_str();
  bench_cmd->add_option("--max-iter", bench.max_iter)->capture_default_str();
  bench_cmd->add_option("--max-fail", bench.max_fail)->capture_default_str();
  bench_cmd->add_option("--out", out_dir, "Output directory");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitValidation;
  }

  if (run->parsed()) {
    RunOptions o;
    o.scenario = scenario;
    if (!scheme.empty()) {
      o.scheme = parse_scheme(scheme);
      if (!o.scheme) {
        std::cerr << "error: unknown scheme '" << scheme << "'\n";
        return kExitValidation;
      }
    }
    o.seed = seed;
    o.literal_utility = literal;
    o.out_dir = resolve_out_dir(out_dir);
    return cmd_run(o, std::cout, std::cerr);
  }
  if (compare->parsed()) {
    CompareOptions o{scenario, seeds_from(seeds, seed), literal, resolve_out_dir(out_dir)};
    return cmd_compare(o, std::cout, std::cerr);
  }
  if (sweep->parsed()) {
    SweepOptions o{scenario, levels, seeds_from(seeds, seed), literal, resolve_out_dir(out_dir)};
    return cmd_sweep_bandwidth(o, std::cout, std::cerr);
  }
  bench.out_dir = resolve_out_dir(out_dir);
  return cmd_bench_planner(bench, std::cout, std::cerr);
}

}  // namespace edgeretrain
