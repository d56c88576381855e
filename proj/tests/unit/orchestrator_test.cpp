#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <map>

#include "edgeretrain/metrics.hpp"
#include "edgeretrain/orchestrator.hpp"
#include "edgeretrain/scenario.hpp"

using namespace edgeretrain;

namespace {

const std::filesystem::path kScenarioDir = EDGERETRAIN_SCENARIO_DIR;

ScenarioConfig adverse() { return load_scenario(kScenarioDir / "adverse.json"); }

void check_log_invariants(const RunResult& run) {
  const auto& ev = run.log.events;
  for (std::size_t i = 1; i < ev.size(); ++i) {
    ASSERT_GE(ev[i].time_s, ev[i - 1].time_s) << "event " << i;
  }
  std::map<int, int> started, ended;
  for (const auto& e : ev) {
    if (e.kind == EventKind::kRetrainingStarted) ++started[e.retraining_id];
    if (e.kind == EventKind::kRetrainingCompleted || e.kind == EventKind::kRetrainingAbandoned) {
      ++ended[e.retraining_id];
    }
  }
  EXPECT_EQ(started.size(), run.retrainings.size());
  for (const auto& [id, n] : started) {
    EXPECT_EQ(n, 1);
    EXPECT_EQ(ended[id], 1) << "retraining " << id;
  }
  EXPECT_EQ(ended.size(), started.size());
}

double mean_f1(const RunResult& run) { return compute_metrics(run).mean_f1; }

}  // namespace

TEST(Orchestrator, NoRetrainingNeverRetrains) {
  for (const auto& cfg : {default_scenario(), adverse()}) {
    const auto run = run_scenario(cfg, SchemeKind::kNR, 3);
    EXPECT_TRUE(run.retrainings.empty());
    EXPECT_EQ(run.log.count(EventKind::kRetrainingStarted), 0u);
    EXPECT_EQ(run.log.count(EventKind::kTriggerFired), 0u);
    EXPECT_EQ(run.windows.size(), 100u);
  }
}

TEST(Orchestrator, EkyaRetrainsEveryPeriod) {
  const auto run = run_scenario(adverse(), SchemeKind::kEkya, 1);
  EXPECT_EQ(run.retrainings.size(), 5u);
  const auto m = compute_metrics(run);
  EXPECT_EQ(m.retrainings, 5);
  for (const auto& r : run.retrainings) {
    if (!r.completed) continue;
    EXPECT_NEAR(r.profiler_s / r.total_s(), 0.27, 1e-12);
  }
  EXPECT_NEAR(m.part_pct[static_cast<std::size_t>(TimePart::kProfiler)], 27.0, 1e-9);
}

TEST(Orchestrator, OneTimeRetrainsOnceFromOpeningMinute) {
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto run = run_scenario(adverse(), SchemeKind::kOTR, seed);
    ASSERT_EQ(run.retrainings.size(), 1u);
    const auto& r = run.retrainings[0];
    EXPECT_GE(r.start_s, 60.0 - 1e-9);
    EXPECT_LT(r.start_s, 70.0);
    EXPECT_GT(r.training_frames, 0);
    EXPECT_EQ(r.env_label, "normal");
  }
}

TEST(Orchestrator, JitAboveCeilingUsesMaxIters) {
  auto cfg = adverse();
  cfg.jit.target_accuracy = 0.999;
  cfg.jit.accuracy_threshold = 0.95;
  const auto run = run_scenario(cfg, SchemeKind::kJIT, 1);
  ASSERT_FALSE(run.retrainings.empty());
  for (const auto& r : run.retrainings) EXPECT_EQ(r.config.epochs, cfg.jit.max_iters);
}

TEST(Orchestrator, ProposedReactsToSnowOnset) {
  const auto cfg = adverse();
  ASSERT_EQ(cfg.env_timeline[1].label, "heavy_snow");
  const int boundary = static_cast<int>(cfg.env_timeline[1].start_s / cfg.window_length_s);
  const auto run = run_scenario(cfg, SchemeKind::kProposed, cfg.rng_seed);
  int first = -1;
  for (const auto& e : run.log.events) {
    if (e.kind == EventKind::kTriggerFired) {
      first = e.window_id;
      break;
    }
  }
  ASSERT_GE(first, 0);
  EXPECT_LE(std::abs(first - boundary), 2) << "first trigger at window " << first;
}

TEST(Orchestrator, LogInvariantsAllSchemes) {
  for (const auto& cfg : {default_scenario(), adverse()}) {
    for (SchemeKind s : kAllSchemes) {
      for (std::uint64_t seed : {1u, 7u}) {
        SCOPED_TRACE(std::string(scheme_name(s)) + " seed " + std::to_string(seed));
        check_log_invariants(run_scenario(cfg, s, seed));
      }
    }
  }
}

TEST(Orchestrator, AccountingMatchesLoggedAddends) {
  for (SchemeKind s : kAllSchemes) {
    const auto run = run_scenario(adverse(), s, 4);
    const auto m = compute_metrics(run);
    const auto logged = logged_part_totals(run);
    for (std::size_t p = 0; p < kTimePartCount; ++p) EXPECT_NEAR(m.part_s[p], logged[p], 1e-9);
    double total = 0;
    for (double x : m.part_s) total += x;
    EXPECT_NEAR(total, m.total_retraining_s, 1e-9);
  }
}

TEST(Orchestrator, NoWindowSeesUpdateBeforeCompletion) {
  // Before the first model update every scheme runs the same pretrained
  // student on the same frames, so window scores must agree with NR.
  const auto cfg = adverse();
  const auto nr = run_scenario(cfg, SchemeKind::kNR, 5);
  for (SchemeKind s : {SchemeKind::kProposed, SchemeKind::kOTR, SchemeKind::kJIT}) {
    const auto run = run_scenario(cfg, s, 5);
    ASSERT_FALSE(run.retrainings.empty());
    const double done = run.retrainings[0].completion_s;
    int compared = 0;
    for (std::size_t i = 0; i < run.windows.size(); ++i) {
      if (run.windows[i].start_s + cfg.window_length_s > done) break;
      EXPECT_EQ(run.windows[i].f1, nr.windows[i].f1) << scheme_name(s) << " window " << i;
      ++compared;
    }
    EXPECT_GT(compared, 0);
    // After completion the retrained environment does better than NR.
    double gain = 0;
    int n = 0;
    for (std::size_t i = 0; i < run.windows.size(); ++i) {
      if (run.windows[i].start_s >= done && run.windows[i].env_label == run.retrainings[0].env_label) {
        gain += run.windows[i].f1 - nr.windows[i].f1;
        ++n;
      }
    }
    if (n > 0 && run.retrainings[0].env_label != "normal") EXPECT_GT(gain / n, 0.0) << scheme_name(s);
  }
}

TEST(Orchestrator, Deterministic) {
  const auto cfg = adverse();
  for (SchemeKind s : kAllSchemes) {
    const auto a = run_scenario(cfg, s, 9);
    const auto b = run_scenario(cfg, s, 9);
    ASSERT_EQ(a.windows.size(), b.windows.size());
    for (std::size_t i = 0; i < a.windows.size(); ++i) EXPECT_EQ(a.windows[i].f1, b.windows[i].f1);
    ASSERT_EQ(a.log.events.size(), b.log.events.size());
    EXPECT_EQ(a.retrainings.size(), b.retrainings.size());
  }
}

TEST(Orchestrator, NoOpRegime) {
  auto cfg = adverse();
  for (auto& seg : cfg.env_timeline) {
    seg.difficulty = 0.0;
    seg.false_positive_rate = 0.0;
  }
  for (auto& b : cfg.bandwidth_trace) {
    b.up_mbps = 1e9;
    b.down_mbps = 1e9;
  }
  std::map<SchemeKind, double> f1;
  for (SchemeKind s : kAllSchemes) {
    double sum = 0;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) sum += mean_f1(run_scenario(cfg, s, seed));
    f1[s] = sum / 3;
  }
  for (SchemeKind s : kAllSchemes) EXPECT_NEAR(f1[s], f1[SchemeKind::kNR], 0.02) << scheme_name(s);
}

TEST(Orchestrator, InfeasiblePlansAreLoggedAndSkipped) {
  auto cfg = adverse();
  cfg.tau0_s = 0.5;
  const auto run = run_scenario(cfg, SchemeKind::kProposed, 1);
  EXPECT_GT(run.infeasible_plans, 0);
  EXPECT_EQ(run.log.count(EventKind::kPlanInfeasible), static_cast<std::size_t>(run.infeasible_plans));
  EXPECT_TRUE(run.retrainings.empty());
  EXPECT_EQ(run.windows.size(), 100u);
}

TEST(Orchestrator, ReplayTrace) {
  const auto cfg = load_scenario(kScenarioDir / "replay.json");
  const auto run = run_scenario(cfg, SchemeKind::kProposed, 1);
  EXPECT_EQ(run.windows.size(), 6u);
  ASSERT_EQ(run.retrainings.size(), 1u);
  EXPECT_EQ(run.retrainings[0].trigger_window, 3);
  EXPECT_EQ(run.retrainings[0].env_label, "fog");
  check_log_invariants(run);
  EXPECT_EQ(run_scenario(cfg, SchemeKind::kNR, 1).windows.size(), 6u);
}
