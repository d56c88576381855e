#ifndef EDGERETRAIN_SCENARIO_HPP_
#define EDGERETRAIN_SCENARIO_HPP_

#include <cstdint>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "edgeretrain/types.hpp"

namespace edgeretrain {

enum class SchemeKind { kProposed, kNR, kOTR, kJIT, kEkya };

inline constexpr SchemeKind kAllSchemes[] = {SchemeKind::kProposed, SchemeKind::kNR,
                                             SchemeKind::kOTR, SchemeKind::kJIT,
                                             SchemeKind::kEkya};

std::string_view scheme_name(SchemeKind scheme);
std::optional<SchemeKind> parse_scheme(std::string_view name);

// kNormalized divides the latency term of the utility by tau0; kLiteral keeps
// raw seconds.
enum class UtilityMode { kNormalized, kLiteral };

// Generative knobs for the synthetic camera.
struct WorldParams {
  double fps = 30.0;
  double object_density = 10.0;     // mean objects per frame
  double base_proficiency = 0.92;  // pretrained student detection probability
  double kappa = 1.0;              // difficulty coupling
  double conf_half_width = 0.2;
  double hardness_jitter = 0.3;    // per-frame relative spread of detection probability
  double boundary_boost = 3.0;     // frame_diff multiplier right after a segment change
  double boundary_boost_s = 5.0;

  friend bool operator==(const WorldParams&, const WorldParams&) = default;
};

struct JitParams {
  double accuracy_threshold = 0.7;  // retrain when window F1 falls below
  double target_accuracy = 0.85;    // train until the curve reaches this
  int max_iters = 40;               // epoch cap per retraining
  int frames_per_window = 25;       // fixed-stride upload, bandwidth-oblivious
  int training_frames = 200;        // most recent uploaded frames used
  std::string teacher_id = "medium";

  friend bool operator==(const JitParams&, const JitParams&) = default;
};

struct EkyaParams {
  double period_s = 200.0;
  double profiler_overhead_fraction = 0.27;
  double stream_mbps = 2.0;          // uplink rate needed for full-stream offload
  double degraded_quality_penalty = 0.35;
  int training_frames = 2000;        // cap on frames sampled from the period
  int labeled_frames = 20;           // frames the oracle labels per retraining

  friend bool operator==(const EkyaParams&, const EkyaParams&) = default;
};

struct OtrParams {
  double collect_s = 60.0;

  friend bool operator==(const OtrParams&, const OtrParams&) = default;
};

struct ScenarioConfig {
  double beta = 0.4;
  double window_length_s = 10.0;
  double tau0_s = 60.0;
  int e_min = 5;
  int e_max = 100;
  int n_min = 50;
  double conf_threshold = 0.5;
  double decay_gamma = 0.8;
  bool weighted_sigma = false;  // trigger spread with the decay weights too
  double d0_mb = 0.25;
  double t0_s = 0.05;
  double m0_mb = 4.0;
  std::vector<TeacherProfile> teacher_set;
  std::vector<EnvSegment> env_timeline;
  std::vector<BandwidthSample> bandwidth_trace;
  std::uint64_t rng_seed = 1;
  int max_iter = 500;
  int max_fail = 50;
  SchemeKind scheme = SchemeKind::kProposed;

  double uplink_budget_fraction = 0.5;
  UtilityMode utility_mode = UtilityMode::kNormalized;
  WorldParams world;
  JitParams jit;
  EkyaParams ekya;
  OtrParams otr;
  std::string trace_path;  // non-empty: replay frames instead of generating

  friend bool operator==(const ScenarioConfig&, const ScenarioConfig&) = default;

  double duration_s() const;
  const EnvSegment& env_at(double t) const;
  BandwidthSample bandwidth_at(double t) const;
  const TeacherProfile* find_teacher(std::string_view id) const;
};

std::vector<TeacherProfile> default_teacher_set();

// Three teachers, a single "normal" segment of 1000 s, 2 MB/s up, 20 MB/s down.
ScenarioConfig default_scenario();

class ScenarioParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ScenarioValidationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Throws ScenarioValidationError naming the first violated invariant.
void validate(const ScenarioConfig& config);

ScenarioConfig parse_scenario(std::string_view text);
ScenarioConfig load_scenario(const std::filesystem::path& path);
std::string serialize_scenario(const ScenarioConfig& config);

}  // namespace edgeretrain

#endif  // EDGERETRAIN_SCENARIO_HPP_
