#ifndef EDGERETRAIN_PLANNER_HPP_
#define EDGERETRAIN_PLANNER_HPP_

#include <optional>
#include <span>
#include <stdexcept>
#include <vector>

#include "edgeretrain/rng.hpp"
#include "edgeretrain/scenario.hpp"
#include "edgeretrain/types.hpp"

namespace edgeretrain {

// Everything the retraining manager knows when a trigger fires.
struct PlannerInput {
  int trigger_selected_count = 0;   // frames uploaded from the trigger window
  int trigger_low_conf_count = 0;   // low-confidence frames in the trigger window
  int window_frame_count = 1;       // frames in the trigger window
  int available_frames = 0;         // buffer + trigger window
  double up_mbps = 1.0;
  double down_mbps = 1.0;
  double d0_mb = 0.25;
  double t0_s = 0.05;
  double m0_mb = 4.0;
  double tau0_s = 60.0;
  int e_min = 5;
  int e_max = 100;
  int n_min = 50;
  std::vector<TeacherProfile> teachers;
  UtilityMode utility_mode = UtilityMode::kNormalized;
};

// Copies the constants, teacher set and utility mode from a scenario; the
// counts and bandwidths are left for the caller.
PlannerInput planner_input_from(const ScenarioConfig& config);

class UnknownTeacherError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct LatencyBreakdown {
  double transmission_s = 0.0;
  double labeling_s = 0.0;
  double training_s = 0.0;
  double model_update_s = 0.0;

  double total() const { return transmission_s + labeling_s + training_s + model_update_s; }
};

struct PlanResult {
  RetrainConfig config;
  double utility = 0.0;
  LatencyBreakdown latency;
  double predicted_latency_s = 0.0;
  double predicted_accuracy = 0.0;
  double urgency = 0.0;
  int iterations_used = 0;
  int accepted_moves = 0;
  long evaluations = 0;
};

// nullopt means no configuration meets the latency budget.
using PlanOutcome = std::optional<PlanResult>;

// Share of low-confidence frames in the trigger window.
double urgency(int low_conf_count, int window_frame_count);

const TeacherProfile& teacher_for(const RetrainConfig& config, const PlannerInput& input);

LatencyBreakdown predict_latency(const RetrainConfig& config, const PlannerInput& input);

// Saturating exponential in epochs * frames.
double predict_accuracy(const RetrainConfig& config, const TeacherProfile& teacher);
double predict_accuracy_for_work(double epoch_frames, const TeacherProfile& teacher);

// Epochs * frames needed for the curve to reach `target`; nullopt when the
// target is at or above the teacher's ceiling.
std::optional<double> work_for_accuracy(double target, const TeacherProfile& teacher);

double utility(const RetrainConfig& config, const PlannerInput& input, double eta);

// Constraint check: latency within tau0, epochs and frames within bounds,
// teacher in the set.
bool is_feasible(const RetrainConfig& config, const PlannerInput& input);

// Strict ordering used by both solvers: higher utility first, then lower
// latency, fewer epochs, fewer frames, earlier teacher.
bool plan_better(const PlanResult& a, const PlanResult& b, const PlannerInput& input);

PlanResult evaluate_plan(const RetrainConfig& config, const PlannerInput& input, double eta);

class GridTooLargeError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

inline constexpr long kBruteForceGridCap = 20'000'000;

// Exhaustive search over e = e_min, e_min + stride_e, ... <= e_max and
// n = n_min, n_min + stride_n, ... <= available_frames for every teacher.
PlanOutcome brute_force_plan(const PlannerInput& input, double eta, int stride_e = 1, int stride_n = 1,
                             long grid_cap = kBruteForceGridCap);

// Starting point of the annealing search.
RetrainConfig initial_config(const PlannerInput& input);

// Randomized configuration search with Metropolis-style acceptance.
PlanOutcome anneal_plan(const PlannerInput& input, double eta, Rng& rng, int max_iter, int max_fail);

// Indices of the `n` newest frames by timestamp, oldest first.
std::vector<std::size_t> select_training_frames(std::span<const FrameRecord> frames, int n);

}  // namespace edgeretrain

#endif  // EDGERETRAIN_PLANNER_HPP_
