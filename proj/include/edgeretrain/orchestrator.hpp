#ifndef EDGERETRAIN_ORCHESTRATOR_HPP_
#define EDGERETRAIN_ORCHESTRATOR_HPP_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "edgeretrain/planner.hpp"
#include "edgeretrain/scenario.hpp"
#include "edgeretrain/types.hpp"

namespace edgeretrain {

enum class EventKind {
  kWindowScored,
  kFramesOffloaded,
  kTriggerFired,
  kPlanChosen,
  kPlanInfeasible,
  kRetrainingStarted,
  kRetrainingCompleted,
  kRetrainingAbandoned,
  kModelUpdated,
};

std::string_view event_kind_name(EventKind kind);

struct Event {
  double time_s = 0.0;
  EventKind kind = EventKind::kWindowScored;
  int window_id = -1;
  int retraining_id = -1;
  std::vector<std::pair<std::string, double>> values;
  std::string note;
};

struct EventLog {
  std::vector<Event> events;

  std::size_t count(EventKind kind) const;
};

struct WindowRecord {
  int window_id = 0;
  double start_s = 0.0;
  std::string env_label;
  double f1 = 0.0;             // all frames of the window, against oracle labels
  double edge_accuracy = 1.0;  // what the edge measured on the frames it received
  int frame_count = 0;
  int low_conf_count = 0;
  int uploaded_count = 0;
  bool triggered = false;
};

// Where each retraining's time went. profiler_s is non-zero only for Ekya.
struct RetrainingRecord {
  int retraining_id = 0;
  int trigger_window = 0;
  double start_s = 0.0;
  double completion_s = 0.0;
  RetrainConfig config;
  LatencyBreakdown latency;
  double profiler_s = 0.0;
  double predicted_accuracy = 0.0;
  double urgency = 0.0;
  double utility = 0.0;
  std::string env_label;
  int training_frames = 0;
  bool completed = false;

  double total_s() const { return latency.total() + profiler_s; }
};

struct RunResult {
  SchemeKind scheme = SchemeKind::kProposed;
  std::uint64_t seed = 0;
  EventLog log;
  std::vector<WindowRecord> windows;
  std::vector<RetrainingRecord> retrainings;
  int infeasible_plans = 0;
  double uplink_mb = 0.0;
};

// Simulates the whole scenario under config.scheme with config.rng_seed.
RunResult run_scenario(const ScenarioConfig& config);

// Same scenario, different scheme and/or seed.
RunResult run_scenario(const ScenarioConfig& config, SchemeKind scheme, std::uint64_t seed);

}  // namespace edgeretrain

#endif  // EDGERETRAIN_ORCHESTRATOR_HPP_
