#include "edgeretrain/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "json.hpp"

namespace edgeretrain {

using nlohmann::json;

std::string_view scheme_name(SchemeKind scheme) {
  switch (scheme) {
    case SchemeKind::kProposed: return "Proposed";
    case SchemeKind::kNR: return "NR";
    case SchemeKind::kOTR: return "OTR";
    case SchemeKind::kJIT: return "JIT";
    case SchemeKind::kEkya: return "Ekya";
  }
  return "?";
}

std::optional<SchemeKind> parse_scheme(std::string_view name) {
  for (SchemeKind s : kAllSchemes) {
    std::string_view canonical = scheme_name(s);
    if (canonical.size() != name.size()) continue;
    bool same = std::equal(canonical.begin(), canonical.end(), name.begin(), [](char a, char b) {
      return std::tolower(static_cast<unsigned char>(a)) == std::tolower(static_cast<unsigned char>(b));
    });
    if (same) return s;
  }
  return std::nullopt;
}

double ScenarioConfig::duration_s() const {
  return env_timeline.empty() ? 0.0 : env_timeline.back().end_s;
}

const EnvSegment& ScenarioConfig::env_at(double t) const {
  for (const auto& seg : env_timeline) {
    if (t < seg.end_s) return seg;
  }
  return env_timeline.back();
}

BandwidthSample ScenarioConfig::bandwidth_at(double t) const {
  BandwidthSample current = bandwidth_trace.front();
  for (const auto& s : bandwidth_trace) {
    if (s.time_s > t) break;
    current = s;
  }
  current.time_s = t;
  return current;
}

const TeacherProfile* ScenarioConfig::find_teacher(std::string_view id) const {
  for (const auto& t : teacher_set) {
    if (t.teacher_id == id) return &t;
  }
  return nullptr;
}

std::vector<TeacherProfile> default_teacher_set() {
  return {
      {"small", 0.004, 0.45, 0.78, 300.0},
      {"medium", 0.007, 0.45, 0.84, 400.0},
      {"large", 0.012, 0.45, 0.88, 500.0},
  };
}

ScenarioConfig default_scenario() {
  ScenarioConfig c;
  c.teacher_set = default_teacher_set();
  c.env_timeline = {{0.0, 1000.0, 0.1, "normal", 1.0, 0.01}};
  c.bandwidth_trace = {{0.0, 2.0, 20.0}};
  return c;
}

namespace {

[[noreturn]] void fail(const std::string& msg) { throw ScenarioValidationError(msg); }

bool in_unit(double x) { return x >= 0.0 && x <= 1.0; }
bool positive(double x) { return std::isfinite(x) && x > 0.0; }

}  // namespace

void validate(const ScenarioConfig& c) {
  if (!in_unit(c.beta)) fail("beta out of [0,1]");
  if (!positive(c.window_length_s)) fail("window_length_s must be positive");
  if (!positive(c.tau0_s)) fail("tau0_s must be positive");
  if (c.e_min < 1) fail("e_min must be >= 1");
  if (c.e_max < c.e_min) fail("e_max must be >= e_min");
  if (c.n_min < 1) fail("n_min must be >= 1");
  if (!in_unit(c.conf_threshold)) fail("conf_threshold out of [0,1]");
  if (!(c.decay_gamma > 0.0 && c.decay_gamma < 1.0)) fail("decay_gamma out of (0,1)");
  if (!positive(c.d0_mb)) fail("d0_mb must be positive");
  if (!positive(c.t0_s)) fail("t0_s must be positive");
  if (!positive(c.m0_mb)) fail("m0_mb must be positive");
  if (c.max_iter < 1) fail("max_iter must be >= 1");
  if (c.max_fail < 1) fail("max_fail must be >= 1");
  if (!(c.uplink_budget_fraction >= 0.0 && c.uplink_budget_fraction <= 1.0)) {
    fail("uplink_budget_fraction out of [0,1]");
  }

  if (c.teacher_set.empty()) fail("teacher_set is empty");
  std::set<std::string> ids;
  for (const auto& t : c.teacher_set) {
    if (t.teacher_id.empty()) fail("teacher_set: empty teacher_id");
    if (!ids.insert(t.teacher_id).second) fail("teacher_set: duplicate teacher_id '" + t.teacher_id + "'");
    if (!positive(t.latency_slope_s)) fail("teacher '" + t.teacher_id + "': latency_slope_s must be positive");
    if (!positive(t.acc_rate)) fail("teacher '" + t.teacher_id + "': acc_rate must be positive");
    if (!(in_unit(t.acc_floor) && in_unit(t.acc_ceiling) && t.acc_floor <= t.acc_ceiling)) {
      fail("teacher '" + t.teacher_id + "': need 0 <= acc_floor <= acc_ceiling <= 1");
    }
  }

  if (c.env_timeline.empty()) fail("env_timeline is empty");
  if (c.env_timeline.front().start_s != 0.0) fail("env_timeline must start at 0");
  for (std::size_t i = 0; i < c.env_timeline.size(); ++i) {
    const auto& seg = c.env_timeline[i];
    if (!(seg.start_s < seg.end_s)) fail("env_timeline: segment " + std::to_string(i) + " has start_s >= end_s");
    if (!in_unit(seg.difficulty)) fail("env_timeline: segment " + std::to_string(i) + " difficulty out of [0,1]");
    if (!in_unit(seg.false_positive_rate)) {
      fail("env_timeline: segment " + std::to_string(i) + " false_positive_rate out of [0,1]");
    }
    if (!(seg.motion_level >= 0.0)) fail("env_timeline: segment " + std::to_string(i) + " motion_level must be >= 0");
    if (seg.label.empty()) fail("env_timeline: segment " + std::to_string(i) + " has empty label");
    if (i > 0) {
      const auto& prev = c.env_timeline[i - 1];
      if (seg.start_s < prev.end_s) {
        fail("env_timeline: segments " + std::to_string(i - 1) + " and " + std::to_string(i) + " overlap");
      }
      if (seg.start_s > prev.end_s) {
        fail("env_timeline: gap between segments " + std::to_string(i - 1) + " and " + std::to_string(i));
      }
    }
  }

  if (c.bandwidth_trace.empty()) fail("bandwidth_trace is empty");
  for (std::size_t i = 0; i < c.bandwidth_trace.size(); ++i) {
    const auto& b = c.bandwidth_trace[i];
    if (!positive(b.up_mbps) || !positive(b.down_mbps)) {
      fail("bandwidth_trace: sample " + std::to_string(i) + " needs positive up_mbps and down_mbps");
    }
    if (i > 0 && !(b.time_s > c.bandwidth_trace[i - 1].time_s)) {
      fail("bandwidth_trace: times must be strictly increasing");
    }
  }

  const auto& w = c.world;
  if (!positive(w.fps)) fail("world.fps must be positive");
  if (!(w.object_density >= 0.0)) fail("world.object_density must be >= 0");
  if (!in_unit(w.base_proficiency)) fail("world.base_proficiency out of [0,1]");
  if (!(w.kappa >= 0.0)) fail("world.kappa must be >= 0");
  if (!(w.conf_half_width >= 0.0)) fail("world.conf_half_width must be >= 0");
  if (!in_unit(w.hardness_jitter)) fail("world.hardness_jitter out of [0,1]");
  if (!(w.boundary_boost >= 1.0)) fail("world.boundary_boost must be >= 1");
  if (!(w.boundary_boost_s >= 0.0)) fail("world.boundary_boost_s must be >= 0");

  if (!in_unit(c.jit.accuracy_threshold)) fail("jit.accuracy_threshold out of [0,1]");
  if (!in_unit(c.jit.target_accuracy)) fail("jit.target_accuracy out of [0,1]");
  if (c.jit.max_iters < 1) fail("jit.max_iters must be >= 1");
  if (c.jit.frames_per_window < 1) fail("jit.frames_per_window must be >= 1");
  if (c.jit.training_frames < 1) fail("jit.training_frames must be >= 1");
  if (!c.find_teacher(c.jit.teacher_id)) fail("jit.teacher_id '" + c.jit.teacher_id + "' not in teacher_set");

  if (!positive(c.ekya.period_s)) fail("ekya.period_s must be positive");
  if (!(c.ekya.profiler_overhead_fraction >= 0.0 && c.ekya.profiler_overhead_fraction < 1.0)) {
    fail("ekya.profiler_overhead_fraction out of [0,1)");
  }
  if (!positive(c.ekya.stream_mbps)) fail("ekya.stream_mbps must be positive");
  if (!in_unit(c.ekya.degraded_quality_penalty)) fail("ekya.degraded_quality_penalty out of [0,1]");
  if (c.ekya.training_frames < 1) fail("ekya.training_frames must be >= 1");
  if (c.ekya.labeled_frames < 0) fail("ekya.labeled_frames must be >= 0");

  if (!positive(c.otr.collect_s)) fail("otr.collect_s must be positive");
}

// ---------------------------------------------------------------------------
// JSON mapping. Missing keys keep their defaults; unknown keys are rejected so
// that typos in hand-edited files do not pass silently.

namespace {

class Reader {
 public:
  Reader(const json& obj, std::string where) : obj_(obj), where_(std::move(where)) {
    if (!obj_.is_object()) throw ScenarioParseError(where_ + ": expected an object");
  }

  template <typename T>
  void get(const char* key, T& out) {
    seen_.insert(key);
    auto it = obj_.find(key);
    if (it == obj_.end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw ScenarioParseError(where_ + "." + key + ": " + e.what());
    }
  }

  const json* child(const char* key) {
    seen_.insert(key);
    auto it = obj_.find(key);
    return it == obj_.end() ? nullptr : &*it;
  }

  void finish() const {
    for (auto it = obj_.begin(); it != obj_.end(); ++it) {
      if (!seen_.count(it.key())) throw ScenarioParseError(where_ + ": unknown key '" + it.key() + "'");
    }
  }

  const std::string& where() const { return where_; }

 private:
  const json& obj_;
  std::string where_;
  std::set<std::string> seen_;
};

template <typename T, typename Fn>
std::vector<T> read_list(const json* arr, const std::string& where, Fn&& read_one) {
  std::vector<T> out;
  if (!arr) return out;
  if (!arr->is_array()) throw ScenarioParseError(where + ": expected an array");
  for (std::size_t i = 0; i < arr->size(); ++i) {
    out.push_back(read_one((*arr)[i], where + "[" + std::to_string(i) + "]"));
  }
  return out;
}

TeacherProfile read_teacher(const json& j, const std::string& where) {
  TeacherProfile t;
  Reader r(j, where);
  r.get("teacher_id", t.teacher_id);
  r.get("latency_slope_s", t.latency_slope_s);
  r.get("acc_floor", t.acc_floor);
  r.get("acc_ceiling", t.acc_ceiling);
  r.get("acc_rate", t.acc_rate);
  r.finish();
  return t;
}

EnvSegment read_segment(const json& j, const std::string& where) {
  EnvSegment s;
  Reader r(j, where);
  r.get("start_s", s.start_s);
  r.get("end_s", s.end_s);
  r.get("difficulty", s.difficulty);
  r.get("label", s.label);
  r.get("motion_level", s.motion_level);
  r.get("false_positive_rate", s.false_positive_rate);
  r.finish();
  return s;
}

BandwidthSample read_bandwidth(const json& j, const std::string& where) {
  BandwidthSample b;
  Reader r(j, where);
  r.get("time_s", b.time_s);
  r.get("up_mbps", b.up_mbps);
  r.get("down_mbps", b.down_mbps);
  r.finish();
  return b;
}

}  // namespace

ScenarioConfig parse_scenario(std::string_view text) {
  json root;
  try {
    root = json::parse(text.begin(), text.end());
  } catch (const json::parse_error& e) {
    throw ScenarioParseError(std::string("malformed scenario: ") + e.what());
  }

  ScenarioConfig c = default_scenario();
  Reader r(root, "scenario");
  r.get("beta", c.beta);
  r.get("window_length_s", c.window_length_s);
  r.get("tau0_s", c.tau0_s);
  r.get("e_min", c.e_min);
  r.get("e_max", c.e_max);
  r.get("n_min", c.n_min);
  r.get("conf_threshold", c.conf_threshold);
  r.get("decay_gamma", c.decay_gamma);
  r.get("weighted_sigma", c.weighted_sigma);
  r.get("d0_mb", c.d0_mb);
  r.get("t0_s", c.t0_s);
  r.get("m0_mb", c.m0_mb);
  r.get("rng_seed", c.rng_seed);
  r.get("max_iter", c.max_iter);
  r.get("max_fail", c.max_fail);
  r.get("uplink_budget_fraction", c.uplink_budget_fraction);
  r.get("trace_path", c.trace_path);

  std::string scheme(scheme_name(c.scheme));
  r.get("scheme", scheme);
  auto parsed = parse_scheme(scheme);
  if (!parsed) throw ScenarioParseError("scenario.scheme: unknown scheme '" + scheme + "'");
  c.scheme = *parsed;

  std::string mode = c.utility_mode == UtilityMode::kLiteral ? "literal" : "normalized";
  r.get("utility_mode", mode);
  if (mode == "normalized") {
    c.utility_mode = UtilityMode::kNormalized;
  } else if (mode == "literal") {
    c.utility_mode = UtilityMode::kLiteral;
  } else {
    throw ScenarioParseError("scenario.utility_mode: expected 'normalized' or 'literal'");
  }

  if (const json* t = r.child("teacher_set")) c.teacher_set = read_list<TeacherProfile>(t, "teacher_set", read_teacher);
  if (const json* e = r.child("env_timeline")) c.env_timeline = read_list<EnvSegment>(e, "env_timeline", read_segment);
  if (const json* b = r.child("bandwidth_trace")) {
    c.bandwidth_trace = read_list<BandwidthSample>(b, "bandwidth_trace", read_bandwidth);
  }

  if (const json* w = r.child("world")) {
    Reader wr(*w, "world");
    wr.get("fps", c.world.fps);
    wr.get("object_density", c.world.object_density);
    wr.get("base_proficiency", c.world.base_proficiency);
    wr.get("kappa", c.world.kappa);
    wr.get("conf_half_width", c.world.conf_half_width);
    wr.get("hardness_jitter", c.world.hardness_jitter);
    wr.get("boundary_boost", c.world.boundary_boost);
    wr.get("boundary_boost_s", c.world.boundary_boost_s);
    wr.finish();
  }
  if (const json* j = r.child("jit")) {
    Reader jr(*j, "jit");
    jr.get("accuracy_threshold", c.jit.accuracy_threshold);
    jr.get("target_accuracy", c.jit.target_accuracy);
    jr.get("max_iters", c.jit.max_iters);
    jr.get("frames_per_window", c.jit.frames_per_window);
    jr.get("training_frames", c.jit.training_frames);
    jr.get("teacher_id", c.jit.teacher_id);
    jr.finish();
  }
  if (const json* e = r.child("ekya")) {
    Reader er(*e, "ekya");
    er.get("period_s", c.ekya.period_s);
    er.get("profiler_overhead_fraction", c.ekya.profiler_overhead_fraction);
    er.get("stream_mbps", c.ekya.stream_mbps);
    er.get("degraded_quality_penalty", c.ekya.degraded_quality_penalty);
    er.get("training_frames", c.ekya.training_frames);
    er.get("labeled_frames", c.ekya.labeled_frames);
    er.finish();
  }
  if (const json* o = r.child("otr")) {
    Reader orr(*o, "otr");
    orr.get("collect_s", c.otr.collect_s);
    orr.finish();
  }
  r.finish();

  validate(c);
  return c;
}

ScenarioConfig load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ScenarioParseError("cannot open scenario file: " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  ScenarioConfig c;
  try {
    c = parse_scenario(buf.str());
  } catch (const ScenarioParseError& e) {
    throw ScenarioParseError(path.string() + ": " + e.what());
  }
  if (!c.trace_path.empty() && std::filesystem::path(c.trace_path).is_relative()) {
    c.trace_path = (path.parent_path() / c.trace_path).string();
  }
  return c;
}

std::string serialize_scenario(const ScenarioConfig& c) {
  json root = json::object();
  root["beta"] = c.beta;
  root["window_length_s"] = c.window_length_s;
  root["tau0_s"] = c.tau0_s;
  root["e_min"] = c.e_min;
  root["e_max"] = c.e_max;
  root["n_min"] = c.n_min;
  root["conf_threshold"] = c.conf_threshold;
  root["decay_gamma"] = c.decay_gamma;
  root["weighted_sigma"] = c.weighted_sigma;
  root["d0_mb"] = c.d0_mb;
  root["t0_s"] = c.t0_s;
  root["m0_mb"] = c.m0_mb;
  root["rng_seed"] = c.rng_seed;
  root["max_iter"] = c.max_iter;
  root["max_fail"] = c.max_fail;
  root["scheme"] = std::string(scheme_name(c.scheme));
  root["uplink_budget_fraction"] = c.uplink_budget_fraction;
  root["utility_mode"] = c.utility_mode == UtilityMode::kLiteral ? "literal" : "normalized";
  if (!c.trace_path.empty()) root["trace_path"] = c.trace_path;

  json teachers = json::array();
  for (const auto& t : c.teacher_set) {
    teachers.push_back({{"teacher_id", t.teacher_id},
                        {"latency_slope_s", t.latency_slope_s},
                        {"acc_floor", t.acc_floor},
                        {"acc_ceiling", t.acc_ceiling},
                        {"acc_rate", t.acc_rate}});
  }
  root["teacher_set"] = teachers;

  json timeline = json::array();
  for (const auto& s : c.env_timeline) {
    timeline.push_back({{"start_s", s.start_s},
                        {"end_s", s.end_s},
                        {"difficulty", s.difficulty},
                        {"label", s.label},
                        {"motion_level", s.motion_level},
                        {"false_positive_rate", s.false_positive_rate}});
  }
  root["env_timeline"] = timeline;

  json bw = json::array();
  for (const auto& b : c.bandwidth_trace) {
    bw.push_back({{"time_s", b.time_s}, {"up_mbps", b.up_mbps}, {"down_mbps", b.down_mbps}});
  }
  root["bandwidth_trace"] = bw;

  root["world"] = {{"fps", c.world.fps},
                   {"object_density", c.world.object_density},
                   {"base_proficiency", c.world.base_proficiency},
                   {"kappa", c.world.kappa},
                   {"conf_half_width", c.world.conf_half_width},
                   {"hardness_jitter", c.world.hardness_jitter},
                   {"boundary_boost", c.world.boundary_boost},
                   {"boundary_boost_s", c.world.boundary_boost_s}};
  root["jit"] = {{"accuracy_threshold", c.jit.accuracy_threshold},
                 {"target_accuracy", c.jit.target_accuracy},
                 {"max_iters", c.jit.max_iters},
                 {"frames_per_window", c.jit.frames_per_window},
                 {"training_frames", c.jit.training_frames},
                 {"teacher_id", c.jit.teacher_id}};
  root["ekya"] = {{"period_s", c.ekya.period_s},
                  {"profiler_overhead_fraction", c.ekya.profiler_overhead_fraction},
                  {"stream_mbps", c.ekya.stream_mbps},
                  {"degraded_quality_penalty", c.ekya.degraded_quality_penalty},
                  {"training_frames", c.ekya.training_frames},
                  {"labeled_frames", c.ekya.labeled_frames}};
  root["otr"] = {{"collect_s", c.otr.collect_s}};
  return root.dump(2) + "\n";
}

}  // namespace edgeretrain
