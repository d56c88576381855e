#ifndef EDGERETRAIN_TYPES_HPP_
#define EDGERETRAIN_TYPES_HPP_

#include <cstdint>
#include <string>
#include <vector>

namespace edgeretrain {

using FrameId = std::int64_t;

// One object reported by the on-camera student model.
struct DetectionStat {
  double confidence = 0.0;       // [0, 1]
  bool is_true_positive = false; // only the world model / oracle knows this
};

struct FrameRecord {
  FrameId frame_id = 0;
  double timestamp_s = 0.0;
  std::vector<DetectionStat> detections;
  double frame_diff = 0.0;           // pixel-change magnitude proxy, >= 0
  int oracle_object_count = 0;       // ground-truth objects in the frame
};

struct WindowSummary {
  int window_id = 0;
  std::vector<FrameRecord> frames;   // the full window
  std::vector<FrameId> selected;     // after bandwidth pruning
  std::vector<FrameId> low_conf_set; // before pruning, window order
  double accuracy = 1.0;             // mean F1 over the selected frames
  bool is_trigger_window = false;
};

// Retraining knobs: epochs, number of training frames, teacher model.
struct RetrainConfig {
  int epochs = 0;
  int frame_count = 0;
  std::string teacher_id;

  friend bool operator==(const RetrainConfig&, const RetrainConfig&) = default;
};

// Offline-profiled teacher: training time is linear in epochs * frames with
// slope latency_slope_s, and retrained accuracy saturates exponentially in
// epochs * frames from acc_floor towards acc_ceiling with scale acc_rate.
struct TeacherProfile {
  std::string teacher_id;
  double latency_slope_s = 0.0;
  double acc_floor = 0.0;
  double acc_ceiling = 0.0;
  double acc_rate = 1.0;

  friend bool operator==(const TeacherProfile&, const TeacherProfile&) = default;
};

struct EnvSegment {
  double start_s = 0.0;
  double end_s = 0.0;
  double difficulty = 0.0; // [0, 1]
  std::string label;
  double motion_level = 1.0;
  double false_positive_rate = 0.0; // [0, 1]

  friend bool operator==(const EnvSegment&, const EnvSegment&) = default;
};

struct BandwidthSample {
  double time_s = 0.0;
  double up_mbps = 0.0;   // MB/s, same unit as the per-frame data size
  double down_mbps = 0.0;

  friend bool operator==(const BandwidthSample&, const BandwidthSample&) = default;
};

}  // namespace edgeretrain

#endif  // EDGERETRAIN_TYPES_HPP_
