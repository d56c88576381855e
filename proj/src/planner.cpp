#include "edgeretrain/planner.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace edgeretrain {

namespace {

constexpr double kMetropolisEpsilon = 1e-6;

std::size_t teacher_index(const RetrainConfig& config, const PlannerInput& input) {
  for (std::size_t i = 0; i < input.teachers.size(); ++i) {
    if (input.teachers[i].teacher_id == config.teacher_id) return i;
  }
  throw UnknownTeacherError("unknown teacher_id '" + config.teacher_id + "'");
}

int clamp_step(int value, int step, int lo, int hi) {
  return std::max(std::min(value + step, hi), lo);
}

}  // namespace

PlannerInput planner_input_from(const ScenarioConfig& config) {
  PlannerInput in;
  in.d0_mb = config.d0_mb;
  in.t0_s = config.t0_s;
  in.m0_mb = config.m0_mb;
  in.tau0_s = config.tau0_s;
  in.e_min = config.e_min;
  in.e_max = config.e_max;
  in.n_min = config.n_min;
  in.teachers = config.teacher_set;
  in.utility_mode = config.utility_mode;
  return in;
}

double urgency(int low_conf_count, int window_frame_count) {
  if (window_frame_count <= 0) throw std::invalid_argument("urgency: window has no frames");
  if (low_conf_count < 0 || low_conf_count > window_frame_count) {
    throw std::invalid_argument("urgency: low_conf_count out of [0, window_frame_count]");
  }
  return static_cast<double>(low_conf_count) / static_cast<double>(window_frame_count);
}

const TeacherProfile& teacher_for(const RetrainConfig& config, const PlannerInput& input) {
  return input.teachers[teacher_index(config, input)];
}

LatencyBreakdown predict_latency(const RetrainConfig& config, const PlannerInput& input) {
  const TeacherProfile& teacher = teacher_for(config, input);
  const double uploaded = static_cast<double>(input.trigger_selected_count);
  LatencyBreakdown t;
  t.transmission_s = input.d0_mb * uploaded / input.up_mbps;
  t.labeling_s = input.t0_s * uploaded;
  t.training_s = static_cast<double>(config.epochs) * static_cast<double>(config.frame_count) *
                 teacher.latency_slope_s;
  t.model_update_s = input.m0_mb / input.down_mbps;
  return t;
}

double predict_accuracy_for_work(double epoch_frames, const TeacherProfile& teacher) {
  return teacher.acc_ceiling -
         (teacher.acc_ceiling - teacher.acc_floor) * std::exp(-epoch_frames / teacher.acc_rate);
}

double predict_accuracy(const RetrainConfig& config, const TeacherProfile& teacher) {
  return predict_accuracy_for_work(static_cast<double>(config.epochs) * static_cast<double>(config.frame_count),
                                   teacher);
}

std::optional<double> work_for_accuracy(double target, const TeacherProfile& teacher) {
  if (target <= teacher.acc_floor) return 0.0;
  if (target >= teacher.acc_ceiling) return std::nullopt;
  return -teacher.acc_rate * std::log((teacher.acc_ceiling - target) / (teacher.acc_ceiling - teacher.acc_floor));
}

namespace {

double utility_of(double accuracy, double latency_s, const PlannerInput& input, double eta) {
  const double penalty = input.utility_mode == UtilityMode::kNormalized ? latency_s / input.tau0_s : latency_s;
  return accuracy - eta * penalty;
}

}  // namespace

double utility(const RetrainConfig& config, const PlannerInput& input, double eta) {
  const TeacherProfile& teacher = teacher_for(config, input);
  return utility_of(predict_accuracy(config, teacher), predict_latency(config, input).total(), input, eta);
}

bool is_feasible(const RetrainConfig& config, const PlannerInput& input) {
  if (config.epochs < input.e_min || config.epochs > input.e_max) return false;
  if (config.frame_count < input.n_min || config.frame_count > input.available_frames) return false;
  const bool known = std::any_of(input.teachers.begin(), input.teachers.end(),
                                 [&](const TeacherProfile& t) { return t.teacher_id == config.teacher_id; });
  if (!known) return false;
  return predict_latency(config, input).total() <= input.tau0_s;
}

PlanResult evaluate_plan(const RetrainConfig& config, const PlannerInput& input, double eta) {
  PlanResult r;
  r.config = config;
  r.latency = predict_latency(config, input);
  r.predicted_latency_s = r.latency.total();
  r.predicted_accuracy = predict_accuracy(config, teacher_for(config, input));
  r.utility = utility_of(r.predicted_accuracy, r.predicted_latency_s, input, eta);
  r.urgency = eta;
  return r;
}

bool plan_better(const PlanResult& a, const PlanResult& b, const PlannerInput& input) {
  if (a.utility != b.utility) return a.utility > b.utility;
  if (a.predicted_latency_s != b.predicted_latency_s) return a.predicted_latency_s < b.predicted_latency_s;
  if (a.config.epochs != b.config.epochs) return a.config.epochs < b.config.epochs;
  if (a.config.frame_count != b.config.frame_count) return a.config.frame_count < b.config.frame_count;
  return teacher_index(a.config, input) < teacher_index(b.config, input);
}

PlanOutcome brute_force_plan(const PlannerInput& input, double eta, int stride_e, int stride_n, long grid_cap) {
  if (stride_e < 1 || stride_n < 1) throw std::invalid_argument("brute_force_plan: strides must be >= 1");
  if (input.available_frames < input.n_min || input.e_max < input.e_min || input.teachers.empty()) {
    return std::nullopt;
  }
  const long e_count = (input.e_max - input.e_min) / stride_e + 1;
  const long n_count = (input.available_frames - input.n_min) / stride_n + 1;
  const long grid = e_count * n_count * static_cast<long>(input.teachers.size());
  if (grid > grid_cap) {
    throw GridTooLargeError("brute_force_plan: grid of " + std::to_string(grid) + " configs exceeds cap " +
                            std::to_string(grid_cap));
  }

  std::optional<PlanResult> best;
  long evaluations = 0;
  for (int e = input.e_min; e <= input.e_max; e += stride_e) {
    for (int n = input.n_min; n <= input.available_frames; n += stride_n) {
      for (const auto& teacher : input.teachers) {
        RetrainConfig c{e, n, teacher.teacher_id};
        PlanResult r = evaluate_plan(c, input, eta);
        ++evaluations;
        if (r.predicted_latency_s > input.tau0_s) continue;
        if (!best || plan_better(r, *best, input)) best = r;
      }
    }
  }
  if (best) {
    best->evaluations = evaluations;
    best->iterations_used = static_cast<int>(std::min<long>(evaluations, INT32_MAX));
  }
  return best;
}

RetrainConfig initial_config(const PlannerInput& input) {
  const auto cheapest = std::min_element(
      input.teachers.begin(), input.teachers.end(),
      [](const TeacherProfile& a, const TeacherProfile& b) { return a.latency_slope_s < b.latency_slope_s; });
  const int n = std::min(std::max(input.n_min, input.available_frames / 2), input.available_frames);
  RetrainConfig c{input.e_min, n, cheapest->teacher_id};
  if (!is_feasible(c, input)) c.frame_count = input.n_min;  // the minimum-latency corner
  return c;
}

PlanOutcome anneal_plan(const PlannerInput& input, double eta, Rng& rng, int max_iter, int max_fail) {
  if (input.available_frames < input.n_min || input.e_max < input.e_min || input.teachers.empty()) {
    return std::nullopt;
  }
  const RetrainConfig start = initial_config(input);
  if (!is_feasible(start, input)) return std::nullopt;

  PlanResult current = evaluate_plan(start, input, eta);
  PlanResult best = current;
  long evaluations = 1;
  int iter = 0;
  int fails = 0;
  int accepted = 0;

  while (iter < max_iter && fails < max_fail) {
    RetrainConfig cand;
    const int de = static_cast<int>(rng.uniform_int(0, input.e_min));
    cand.epochs = clamp_step(current.config.epochs, rng.bernoulli(0.5) ? de : -de, input.e_min, input.e_max);
    const int dn = static_cast<int>(rng.uniform_int(0, input.n_min));
    cand.frame_count =
        clamp_step(current.config.frame_count, rng.bernoulli(0.5) ? dn : -dn, input.n_min, input.available_frames);
    const auto pick = rng.uniform_int(0, static_cast<std::int64_t>(input.teachers.size()) - 1);
    cand.teacher_id = input.teachers[static_cast<std::size_t>(pick)].teacher_id;

    PlanResult next = evaluate_plan(cand, input, eta);
    ++evaluations;
    ++iter;
    if (next.predicted_latency_s > input.tau0_s) {
      ++fails;
      continue;
    }
    const double delta = next.utility - current.utility;
    const bool accept =
        delta > 0.0 || std::exp(delta / std::max(std::abs(next.utility), kMetropolisEpsilon)) > rng.uniform();
    if (accept) {
      current = next;
      fails = 0;
      ++accepted;
      if (plan_better(current, best, input)) best = current;
    } else {
      ++fails;
    }
  }

  best.iterations_used = iter;
  best.accepted_moves = accepted;
  best.evaluations = evaluations;
  return best;
}

std::vector<std::size_t> select_training_frames(std::span<const FrameRecord> frames, int n) {
  std::vector<std::size_t> idx(frames.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return frames[a].timestamp_s < frames[b].timestamp_s; });
  const auto keep = static_cast<std::size_t>(std::clamp(n, 0, static_cast<int>(idx.size())));
  idx.erase(idx.begin(), idx.end() - static_cast<std::ptrdiff_t>(keep));
  return idx;
}

}  // namespace edgeretrain
