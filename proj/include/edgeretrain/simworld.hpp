#ifndef EDGERETRAIN_SIMWORLD_HPP_
#define EDGERETRAIN_SIMWORLD_HPP_

#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "edgeretrain/rng.hpp"
#include "edgeretrain/scenario.hpp"
#include "edgeretrain/types.hpp"

namespace edgeretrain {

struct PendingUpdate {
  double ready_time_s = 0.0;
  double new_proficiency = 0.0;
  std::string env_label;
};

// The on-camera student. The pretrained model detects an object with
// probability pretrained * (1 - kappa * difficulty); retraining on an
// environment installs a specialized detection probability for that label
// which acts as a floor from its ready time on.
class StudentState {
 public:
  explicit StudentState(double pretrained_proficiency = 0.92) : pretrained_(pretrained_proficiency) {}

  double pretrained() const { return pretrained_; }

  // Specialized proficiency for the label as of time t, including pending
  // updates whose ready time has passed.
  std::optional<double> specialized(const std::string& label, double t) const;

  double detection_probability(const EnvSegment& env, double kappa, double t) const;

  void schedule(PendingUpdate update);

  // Folds every pending update with ready_time_s <= t into the proficiency map.
  void advance_to(double t);

  const std::map<std::string, double>& proficiency() const { return proficiency_; }
  const std::vector<PendingUpdate>& pending() const { return pending_; }

 private:
  double pretrained_;
  std::map<std::string, double> proficiency_;
  std::vector<PendingUpdate> pending_;  // sorted by ready time
};

struct WindowRequest {
  double start_s = 0.0;
  double length_s = 10.0;
  FrameId first_frame_id = 0;
  // Multiplies every detection probability; < 1 models degraded input such as
  // a bandwidth-starved video stream.
  double quality = 1.0;
};

std::vector<FrameRecord> generate_window(std::span<const EnvSegment> timeline, const StudentState& student,
                                         const WorldParams& world, const WindowRequest& request, Rng& rng);

// Single-environment convenience form.
std::vector<FrameRecord> generate_window(const EnvSegment& env, const StudentState& student,
                                         double window_length_s, double fps, Rng& rng,
                                         const WorldParams& world = {});

struct F1Counts {
  long true_positives = 0;
  long false_positives = 0;
  long false_negatives = 0;
};

F1Counts count_f1(std::span<const FrameRecord> frames);
double f1_from_counts(const F1Counts& counts);

// Micro-averaged F1 over the frames; 1.0 when there is nothing to find and
// nothing was reported.
double score_f1(std::span<const FrameRecord> frames);

// Edge-side ground-truth labeler. Labels are exact by construction; only the
// per-frame latency matters.
struct OracleLabeler {
  double t0_s = 0.05;

  double labeling_time(std::size_t frame_count) const { return t0_s * static_cast<double>(frame_count); }
};

// Schedules the retrained model: at completion_time_s the proficiency for
// env_label becomes max(current, predicted accuracy of the config).
void apply_retraining(StudentState& student, const RetrainConfig& config, const TeacherProfile& teacher,
                      const std::string& env_label, double completion_time_s);

}  // namespace edgeretrain

#endif  // EDGERETRAIN_SIMWORLD_HPP_
