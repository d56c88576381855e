#include "edgeretrain/simworld.hpp"

#include <algorithm>
#include <cmath>

#include "edgeretrain/planner.hpp"

namespace edgeretrain {

namespace {

// False positives come out of the detector with low scores.
constexpr double kFalsePositiveConfLo = 0.05;
constexpr double kFalsePositiveConfHi = 0.45;

const EnvSegment& segment_at(std::span<const EnvSegment> timeline, double t) {
  for (const auto& seg : timeline) {
    if (t < seg.end_s) return seg;
  }
  return timeline.back();
}

}  // namespace

std::optional<double> StudentState::specialized(const std::string& label, double t) const {
  std::optional<double> value;
  if (auto it = proficiency_.find(label); it != proficiency_.end()) value = it->second;
  for (const auto& u : pending_) {
    if (u.ready_time_s > t) break;
    if (u.env_label == label) value = std::max(value.value_or(0.0), u.new_proficiency);
  }
  return value;
}

double StudentState::detection_probability(const EnvSegment& env, double kappa, double t) const {
  const double pretrained = std::clamp(pretrained_ * (1.0 - kappa * env.difficulty), 0.0, 1.0);
  return std::max(pretrained, specialized(env.label, t).value_or(0.0));
}

void StudentState::schedule(PendingUpdate update) {
  auto pos = std::upper_bound(pending_.begin(), pending_.end(), update.ready_time_s,
                              [](double t, const PendingUpdate& u) { return t < u.ready_time_s; });
  pending_.insert(pos, std::move(update));
}

void StudentState::advance_to(double t) {
  auto it = pending_.begin();
  for (; it != pending_.end() && it->ready_time_s <= t; ++it) {
    double& slot = proficiency_[it->env_label];
    slot = std::max(slot, it->new_proficiency);
  }
  pending_.erase(pending_.begin(), it);
}

std::vector<FrameRecord> generate_window(std::span<const EnvSegment> timeline, const StudentState& student,
                                         const WorldParams& world, const WindowRequest& request, Rng& rng) {
  const auto count = static_cast<std::size_t>(std::llround(request.length_s * world.fps));
  std::vector<FrameRecord> frames;
  frames.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    FrameRecord f;
    f.frame_id = request.first_frame_id + static_cast<FrameId>(k);
    f.timestamp_s = request.start_s + static_cast<double>(k) / world.fps;
    const EnvSegment& env = segment_at(timeline, f.timestamp_s);

    const double p_env =
        std::clamp(student.detection_probability(env, world.kappa, f.timestamp_s) * request.quality, 0.0, 1.0);
    // Per-frame hardness perturbs the miss rate, so p = 1 and p = 0 stay exact.
    const double miss = (1.0 - p_env) * (1.0 + world.hardness_jitter * (2.0 * rng.uniform() - 1.0));
    const double p = std::clamp(1.0 - miss, 0.0, 1.0);

    f.oracle_object_count = rng.poisson(world.object_density);
    for (int o = 0; o < f.oracle_object_count; ++o) {
      if (rng.bernoulli(p)) {
        const double conf = std::clamp(rng.triangular(p, world.conf_half_width), 0.0, 1.0);
        f.detections.push_back({conf, true});
      }
    }
    const int false_positives = rng.poisson(env.false_positive_rate * world.object_density);
    for (int i = 0; i < false_positives; ++i) {
      f.detections.push_back({rng.uniform(kFalsePositiveConfLo, kFalsePositiveConfHi), false});
    }

    double diff = env.motion_level * (0.5 + rng.uniform());
    const double since_change = f.timestamp_s - env.start_s;
    if (env.start_s > 0.0 && world.boundary_boost_s > 0.0 && since_change < world.boundary_boost_s) {
      diff *= 1.0 + (world.boundary_boost - 1.0) * (1.0 - since_change / world.boundary_boost_s);
    }
    f.frame_diff = diff;
    frames.push_back(std::move(f));
  }
  return frames;
}

std::vector<FrameRecord> generate_window(const EnvSegment& env, const StudentState& student,
                                         double window_length_s, double fps, Rng& rng, const WorldParams& world) {
  WorldParams w = world;
  w.fps = fps;
  WindowRequest req;
  req.start_s = env.start_s;
  req.length_s = window_length_s;
  return generate_window(std::span<const EnvSegment>(&env, 1), student, w, req, rng);
}

F1Counts count_f1(std::span<const FrameRecord> frames) {
  F1Counts c;
  for (const auto& f : frames) {
    long tp = 0;
    for (const auto& d : f.detections) {
      if (d.is_true_positive) {
        ++tp;
      } else {
        ++c.false_positives;
      }
    }
    c.true_positives += tp;
    c.false_negatives += std::max(0L, static_cast<long>(f.oracle_object_count) - tp);
  }
  return c;
}

double f1_from_counts(const F1Counts& c) {
  const long denom = 2 * c.true_positives + c.false_positives + c.false_negatives;
  if (denom == 0) return 1.0;
  return 2.0 * static_cast<double>(c.true_positives) / static_cast<double>(denom);
}

double score_f1(std::span<const FrameRecord> frames) { return f1_from_counts(count_f1(frames)); }

void apply_retraining(StudentState& student, const RetrainConfig& config, const TeacherProfile& teacher,
                      const std::string& env_label, double completion_time_s) {
  student.schedule({completion_time_s, predict_accuracy(config, teacher), env_label});
}

}  // namespace edgeretrain
