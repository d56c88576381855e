#include "edgeretrain/orchestrator.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <memory>

#include "edgeretrain/extractor.hpp"
#include "edgeretrain/simworld.hpp"
#include "edgeretrain/trace.hpp"
#include "edgeretrain/trigger.hpp"

namespace edgeretrain {

std::string_view event_kind_name(EventKind kind) {
  switch (kind) {
    case EventKind::kWindowScored: return "window_scored";
    case EventKind::kFramesOffloaded: return "frames_offloaded";
    case EventKind::kTriggerFired: return "trigger_fired";
    case EventKind::kPlanChosen: return "plan_chosen";
    case EventKind::kPlanInfeasible: return "plan_infeasible";
    case EventKind::kRetrainingStarted: return "retraining_started";
    case EventKind::kRetrainingCompleted: return "retraining_completed";
    case EventKind::kRetrainingAbandoned: return "retraining_abandoned";
    case EventKind::kModelUpdated: return "model_updated";
  }
  return "?";
}

std::size_t EventLog::count(EventKind kind) const {
  return static_cast<std::size_t>(
      std::count_if(events.begin(), events.end(), [&](const Event& e) { return e.kind == kind; }));
}

namespace {

constexpr std::uint64_t kPlannerStreamSalt = 0x9E3779B97F4A7C15ULL;

struct Upload {
  double start_s = 0.0;    // when the link started sending this batch
  double arrival_s = 0.0;  // when the batch is labeled at the edge
};

// Shared state of one run.
class Sim {
 public:
  Sim(const ScenarioConfig& cfg, SchemeKind scheme, std::uint64_t seed, RunResult& out)
      : cfg(cfg),
        out(out),
        world_rng(seed),
        planner_rng(seed * kPlannerStreamSalt + 1),
        student(cfg.world.base_proficiency),
        labeler{cfg.t0_s} {
    out.scheme = scheme;
    out.seed = seed;
  }

  const ScenarioConfig& cfg;
  RunResult& out;
  Rng world_rng;
  Rng planner_rng;
  StudentState student;
  OracleLabeler labeler;
  std::optional<RetrainingRecord> in_flight;

  Event& emit(double t, EventKind kind, int window_id = -1, int retraining_id = -1) {
    out.log.events.push_back({t, kind, window_id, retraining_id, {}, {}});
    return out.log.events.back();
  }

  // Frames queue on a single FIFO uplink and are labeled on arrival.
  Upload upload(double ready_s, int frames, double up_mbps, int window_id) {
    Upload u;
    u.start_s = std::max(ready_s, link_free_s_);
    const double mb = cfg.d0_mb * frames;
    link_free_s_ = u.start_s + mb / up_mbps;
    u.arrival_s = link_free_s_ + labeler.labeling_time(static_cast<std::size_t>(frames));
    out.uplink_mb += mb;
    if (frames > 0) {
      auto& e = emit(link_free_s_, EventKind::kFramesOffloaded, window_id);
      e.values = {{"frames", frames}, {"mb", mb}, {"queue_delay_s", u.start_s - ready_s}};
    }
    return u;
  }

  void start_retraining(RetrainingRecord r, const TeacherProfile& teacher) {
    r.retraining_id = next_retraining_id_++;
    auto& plan = emit(r.start_s, EventKind::kPlanChosen, r.trigger_window, r.retraining_id);
    plan.values = {{"epochs", r.config.epochs},
                   {"frame_count", r.config.frame_count},
                   {"utility", r.utility},
                   {"urgency", r.urgency},
                   {"predicted_accuracy", r.predicted_accuracy},
                   {"transmission_s", r.latency.transmission_s},
                   {"labeling_s", r.latency.labeling_s},
                   {"training_s", r.latency.training_s},
                   {"model_update_s", r.latency.model_update_s},
                   {"profiler_s", r.profiler_s},
                   {"total_s", r.total_s()}};
    plan.note = r.config.teacher_id;
    auto& start = emit(r.start_s, EventKind::kRetrainingStarted, r.trigger_window, r.retraining_id);
    start.values = {{"completion_s", r.completion_s}, {"training_frames", r.training_frames}};
    start.note = r.env_label;
    apply_retraining(student, r.config, teacher, r.env_label, r.completion_s);
    in_flight = std::move(r);
  }

  // Completes the in-flight retraining if it is done by `now`.
  bool settle(double now) {
    if (!in_flight || in_flight->completion_s > now) return false;
    RetrainingRecord r = std::move(*in_flight);
    in_flight.reset();
    r.completed = true;
    emit(r.completion_s, EventKind::kRetrainingCompleted, r.trigger_window, r.retraining_id);
    auto& upd = emit(r.completion_s, EventKind::kModelUpdated, r.trigger_window, r.retraining_id);
    upd.values = {{"proficiency", r.predicted_accuracy}};
    upd.note = r.env_label;
    student.advance_to(r.completion_s);
    out.retrainings.push_back(std::move(r));
    return true;
  }

  void abandon(double now) {
    if (!in_flight) return;
    RetrainingRecord r = std::move(*in_flight);
    in_flight.reset();
    auto& e = emit(now, EventKind::kRetrainingAbandoned, r.trigger_window, r.retraining_id);
    e.values = {{"completion_s", r.completion_s}};
    out.retrainings.push_back(std::move(r));
  }

  const std::string& env_label_at(double t) const { return cfg.env_at(t).label; }

 private:
  double link_free_s_ = 0.0;
  int next_retraining_id_ = 0;
};

struct WindowContext {
  int window_id = 0;
  double start_s = 0.0;
  double end_s = 0.0;
  std::vector<FrameRecord>& frames;
  WindowRecord& record;
};

class Policy {
 public:
  virtual ~Policy() = default;
  virtual double quality(const Sim&, double /*start_s*/) const { return 1.0; }
  virtual void on_window(Sim& sim, WindowContext& w) = 0;
  virtual void on_retraining_complete(Sim&) {}
};

std::vector<FrameRecord> pick_frames(const std::vector<FrameRecord>& frames, const std::vector<FrameId>& ids) {
  std::vector<FrameRecord> out;
  out.reserve(ids.size());
  if (frames.empty()) return out;
  const FrameId first = frames.front().frame_id;
  for (FrameId id : ids) {
    // Generated windows have consecutive ids; trace windows may not.
    const auto idx = static_cast<std::size_t>(id - first);
    if (idx < frames.size() && frames[idx].frame_id == id) {
      out.push_back(frames[idx]);
    } else {
      auto it = std::find_if(frames.begin(), frames.end(), [&](const FrameRecord& f) { return f.frame_id == id; });
      if (it != frames.end()) out.push_back(*it);
    }
  }
  return out;
}

RetrainingRecord record_from_plan(const PlanResult& plan, int window_id, double start_s) {
  RetrainingRecord r;
  r.trigger_window = window_id;
  r.start_s = start_s;
  r.config = plan.config;
  r.latency = plan.latency;
  r.predicted_accuracy = plan.predicted_accuracy;
  r.urgency = plan.urgency;
  r.utility = plan.utility;
  r.completion_s = start_s + r.total_s();
  r.training_frames = plan.config.frame_count;
  return r;
}

// Key frame extraction on the camera, bandwidth-aware upload, and the
// adaptive trigger plus configuration search on the edge.
class ProposedPolicy : public Policy {
 public:
  void on_window(Sim& sim, WindowContext& w) override {
    const auto& cfg = sim.cfg;
    const BandwidthSample bw = cfg.bandwidth_at(w.end_s);
    const int cap = capacity_for_bandwidth(bw.up_mbps, cfg.d0_mb, cfg.window_length_s, cfg.uplink_budget_fraction);
    const ExtractionResult ex = extract(w.frames, cfg.beta, cfg.conf_threshold, cap);
    std::vector<FrameRecord> selected = pick_frames(w.frames, ex.selected);
    const Upload up = sim.upload(w.end_s, static_cast<int>(selected.size()), bw.up_mbps, w.window_id);
    const double accuracy = score_f1(selected);

    w.record.low_conf_count = static_cast<int>(ex.low_conf_set.size());
    w.record.uploaded_count = static_cast<int>(selected.size());
    w.record.edge_accuracy = accuracy;

    WindowSummary summary;
    summary.window_id = w.window_id;
    summary.selected = ex.selected;
    summary.low_conf_set = ex.low_conf_set;
    summary.accuracy = accuracy;

    if (!sim.in_flight && !selected.empty() && should_trigger(history_, accuracy, cfg.decay_gamma, cfg.weighted_sigma)) {
      auto& fired = sim.emit(up.start_s, EventKind::kTriggerFired, w.window_id);
      const auto stats = trigger_stats(history_.accuracies(), cfg.decay_gamma, cfg.weighted_sigma);
      fired.values = {{"accuracy", accuracy}, {"weighted_mean", stats.weighted_mean}, {"stddev", stats.stddev}};

      PlannerInput in = planner_input_from(cfg);
      in.trigger_selected_count = static_cast<int>(selected.size());
      in.trigger_low_conf_count = static_cast<int>(ex.low_conf_set.size());
      in.window_frame_count = static_cast<int>(w.frames.size());
      in.available_frames = static_cast<int>(buffer_.size() + selected.size());
      in.up_mbps = bw.up_mbps;
      in.down_mbps = bw.down_mbps;
      const double eta = urgency(in.trigger_low_conf_count, in.window_frame_count);

      if (auto plan = anneal_plan(in, eta, sim.planner_rng, cfg.max_iter, cfg.max_fail)) {
        RetrainingRecord r = record_from_plan(*plan, w.window_id, up.start_s);
        r.env_label = sim.env_label_at(w.end_s - 1e-9);
        summary.is_trigger_window = true;
        w.record.triggered = true;
        history_.append(std::move(summary));
        sim.start_retraining(std::move(r), teacher_for(plan->config, in));
        return;
      }
      ++sim.out.infeasible_plans;
      auto& inf = sim.emit(up.start_s, EventKind::kPlanInfeasible, w.window_id);
      inf.values = {{"available_frames", in.available_frames}, {"urgency", eta}};
      // Keep the baseline as it was so the condition still holds next window,
      // by which time the buffer has grown.
      buffer_.frames.insert(buffer_.frames.end(), selected.begin(), selected.end());
      return;
    }
    summary.frames = w.frames;
    record_window(history_, buffer_, std::move(summary), selected);
  }

  void on_retraining_complete(Sim&) override { reset_cycle(history_, buffer_); }

 private:
  WindowHistory history_;
  Buffer buffer_;
};

class NoRetrainPolicy : public Policy {
 public:
  void on_window(Sim&, WindowContext&) override {}
};

// Proposed pipeline without the trigger: key frames from the first
// collect_s seconds, one retraining, nothing after.
class OneTimePolicy : public Policy {
 public:
  void on_window(Sim& sim, WindowContext& w) override {
    if (done_) return;
    const auto& cfg = sim.cfg;
    const BandwidthSample bw = cfg.bandwidth_at(w.end_s);
    const int cap = capacity_for_bandwidth(bw.up_mbps, cfg.d0_mb, cfg.window_length_s, cfg.uplink_budget_fraction);
    const ExtractionResult ex = extract(w.frames, cfg.beta, cfg.conf_threshold, cap);
    std::vector<FrameId> ids = ex.selected;
    // A calm opening may have no low-confidence frames at all; fill the
    // remaining capacity with the most-changed frames so the single
    // retraining always has data.
    if (static_cast<int>(ids.size()) < cap) {
      std::vector<const FrameRecord*> rest;
      for (const auto& f : w.frames) {
        if (std::find(ids.begin(), ids.end(), f.frame_id) == ids.end()) rest.push_back(&f);
      }
      const auto extra = std::min(rest.size(), static_cast<std::size_t>(cap) - ids.size());
      std::partial_sort(rest.begin(), rest.begin() + static_cast<std::ptrdiff_t>(extra), rest.end(),
                        [](const FrameRecord* a, const FrameRecord* b) {
                          if (a->frame_diff != b->frame_diff) return a->frame_diff > b->frame_diff;
                          return a->frame_id < b->frame_id;
                        });
      for (std::size_t i = 0; i < extra; ++i) ids.push_back(rest[i]->frame_id);
    }
    std::vector<FrameRecord> selected = pick_frames(w.frames, ids);
    const Upload up = sim.upload(w.end_s, static_cast<int>(selected.size()), bw.up_mbps, w.window_id);
    w.record.low_conf_count = static_cast<int>(ex.low_conf_set.size());
    w.record.uploaded_count = static_cast<int>(selected.size());
    w.record.edge_accuracy = score_f1(selected);
    collected_ += static_cast<int>(selected.size());
    if (w.end_s + 1e-9 < cfg.otr.collect_s) return;

    done_ = true;
    PlannerInput in = planner_input_from(cfg);
    in.trigger_selected_count = static_cast<int>(selected.size());
    in.trigger_low_conf_count = static_cast<int>(ex.low_conf_set.size());
    in.window_frame_count = static_cast<int>(w.frames.size());
    in.available_frames = collected_;
    in.n_min = std::max(1, std::min(in.n_min, collected_));
    in.up_mbps = bw.up_mbps;
    in.down_mbps = bw.down_mbps;
    const double eta = urgency(in.trigger_low_conf_count, in.window_frame_count);
    auto& fired = sim.emit(up.start_s, EventKind::kTriggerFired, w.window_id);
    fired.values = {{"collected_frames", collected_}};

    PlanOutcome plan;
    if (collected_ > 0) plan = anneal_plan(in, eta, sim.planner_rng, cfg.max_iter, cfg.max_fail);
    if (!plan) {
      ++sim.out.infeasible_plans;
      auto& inf = sim.emit(up.start_s, EventKind::kPlanInfeasible, w.window_id);
      inf.values = {{"available_frames", collected_}, {"urgency", eta}};
      return;
    }
    RetrainingRecord r = record_from_plan(*plan, w.window_id, up.start_s);
    r.env_label = sim.env_label_at(w.end_s - 1e-9);
    w.record.triggered = true;
    sim.start_retraining(std::move(r), teacher_for(plan->config, in));
  }

 private:
  bool done_ = false;
  int collected_ = 0;
};

// Fixed accuracy threshold; uploads a fixed stride of frames regardless of
// bandwidth and trains one teacher until the target accuracy or the epoch cap.
class JitPolicy : public Policy {
 public:
  void on_window(Sim& sim, WindowContext& w) override {
    const auto& cfg = sim.cfg;
    const auto& jit = cfg.jit;
    const BandwidthSample bw = cfg.bandwidth_at(w.end_s);
    const int count = std::min<int>(jit.frames_per_window, static_cast<int>(w.frames.size()));
    std::vector<FrameRecord> sampled;
    for (int k = 0; k < count; ++k) {
      sampled.push_back(w.frames[static_cast<std::size_t>(k) * w.frames.size() / static_cast<std::size_t>(count)]);
    }
    const Upload up = sim.upload(w.end_s, count, bw.up_mbps, w.window_id);
    const double accuracy = score_f1(sampled);
    w.record.uploaded_count = count;
    w.record.edge_accuracy = accuracy;
    for (auto& f : sampled) recent_.push_back(std::move(f));
    while (static_cast<int>(recent_.size()) > jit.training_frames) recent_.pop_front();

    if (sim.in_flight || !(accuracy < jit.accuracy_threshold) || recent_.empty()) return;

    auto& fired = sim.emit(up.start_s, EventKind::kTriggerFired, w.window_id);
    fired.values = {{"accuracy", accuracy}, {"threshold", jit.accuracy_threshold}};

    PlannerInput in = planner_input_from(cfg);
    in.trigger_selected_count = count;
    in.window_frame_count = static_cast<int>(w.frames.size());
    in.available_frames = static_cast<int>(recent_.size());
    in.up_mbps = bw.up_mbps;
    in.down_mbps = bw.down_mbps;
    const TeacherProfile& teacher = *cfg.find_teacher(jit.teacher_id);
    const int n = in.available_frames;
    int epochs = jit.max_iters;
    if (auto work = work_for_accuracy(jit.target_accuracy, teacher)) {
      epochs = std::clamp(static_cast<int>(std::ceil(*work / n)), 1, jit.max_iters);
    }
    RetrainConfig config{epochs, n, teacher.teacher_id};
    PlanResult plan = evaluate_plan(config, in, 0.0);
    RetrainingRecord r = record_from_plan(plan, w.window_id, up.start_s);
    r.env_label = sim.env_label_at(w.end_s - 1e-9);
    w.record.triggered = true;
    sim.start_retraining(std::move(r), teacher);
  }

  void on_retraining_complete(Sim&) override { recent_.clear(); }

 private:
  std::deque<FrameRecord> recent_;
};

// Periodic retraining on the edge with a micro-profiler, while the whole
// video stream is offloaded for edge-side inference.
class EkyaPolicy : public Policy {
 public:
  explicit EkyaPolicy(const ScenarioConfig& cfg) : next_due_s_(cfg.ekya.period_s) {}

  double quality(const Sim& sim, double start_s) const override {
    const auto& ekya = sim.cfg.ekya;
    const double up = sim.cfg.bandwidth_at(start_s).up_mbps;
    const double delivered = std::min(1.0, up / ekya.stream_mbps);
    return 1.0 - ekya.degraded_quality_penalty * (1.0 - delivered);
  }

  void on_window(Sim& sim, WindowContext& w) override {
    const auto& cfg = sim.cfg;
    const auto& ekya = cfg.ekya;
    const BandwidthSample bw = cfg.bandwidth_at(w.start_s);
    sim.out.uplink_mb += std::min(bw.up_mbps, ekya.stream_mbps) * (w.end_s - w.start_s);
    w.record.uploaded_count = static_cast<int>(w.frames.size());
    w.record.edge_accuracy = w.record.f1;
    frames_seen_ += static_cast<int>(w.frames.size());

    if (w.end_s + 1e-9 < next_due_s_) return;
    next_due_s_ += ekya.period_s;
    if (sim.in_flight) return;

    auto& fired = sim.emit(w.end_s, EventKind::kTriggerFired, w.window_id);
    fired.values = {{"period_s", ekya.period_s}};

    PlannerInput in = planner_input_from(cfg);
    in.d0_mb = 0.0;  // the stream is already on the edge
    in.trigger_selected_count = std::min<int>(ekya.labeled_frames, static_cast<int>(w.frames.size()));
    in.window_frame_count = static_cast<int>(w.frames.size());
    in.available_frames = std::min(ekya.training_frames, frames_seen_);
    in.up_mbps = bw.up_mbps;
    in.down_mbps = cfg.bandwidth_at(w.end_s).down_mbps;
    const int stride_n = std::max(1, (in.available_frames - in.n_min) / 200);
    // Accuracy-only selection within the latency budget.
    PlanOutcome plan = brute_force_plan(in, 0.0, 1, stride_n);
    if (!plan) {
      ++sim.out.infeasible_plans;
      auto& inf = sim.emit(w.end_s, EventKind::kPlanInfeasible, w.window_id);
      inf.values = {{"available_frames", in.available_frames}};
      return;
    }
    RetrainingRecord r = record_from_plan(*plan, w.window_id, w.end_s);
    const double f = ekya.profiler_overhead_fraction;
    r.profiler_s = r.latency.total() * f / (1.0 - f);
    r.completion_s = r.start_s + r.total_s();
    r.env_label = sim.env_label_at(w.end_s - 1e-9);
    w.record.triggered = true;
    frames_seen_ = 0;
    sim.start_retraining(std::move(r), teacher_for(plan->config, in));
  }

 private:
  double next_due_s_;
  int frames_seen_ = 0;
};

std::unique_ptr<Policy> make_policy(SchemeKind scheme, const ScenarioConfig& cfg) {
  switch (scheme) {
    case SchemeKind::kProposed: return std::make_unique<ProposedPolicy>();
    case SchemeKind::kNR: return std::make_unique<NoRetrainPolicy>();
    case SchemeKind::kOTR: return std::make_unique<OneTimePolicy>();
    case SchemeKind::kJIT: return std::make_unique<JitPolicy>();
    case SchemeKind::kEkya: return std::make_unique<EkyaPolicy>(cfg);
  }
  return nullptr;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& config) { return run_scenario(config, config.scheme, config.rng_seed); }

RunResult run_scenario(const ScenarioConfig& config, SchemeKind scheme, std::uint64_t seed) {
  RunResult out;
  Sim sim(config, scheme, seed, out);
  auto policy = make_policy(scheme, config);

  std::vector<FrameRecord> trace;
  std::size_t trace_pos = 0;
  if (!config.trace_path.empty()) trace = load_trace(config.trace_path);

  const double duration = config.duration_s();
  const int windows = static_cast<int>(std::floor(duration / config.window_length_s + 1e-9));
  FrameId next_frame_id = 0;

  for (int w = 0; w < windows; ++w) {
    const double start = w * config.window_length_s;
    const double end = start + config.window_length_s;

    std::vector<FrameRecord> frames;
    if (trace.empty() && config.trace_path.empty()) {
      WindowRequest req;
      req.start_s = start;
      req.length_s = config.window_length_s;
      req.first_frame_id = next_frame_id;
      req.quality = policy->quality(sim, start);
      frames = generate_window(config.env_timeline, sim.student, config.world, req, sim.world_rng);
      next_frame_id += static_cast<FrameId>(frames.size());
    } else {
      while (trace_pos < trace.size() && trace[trace_pos].timestamp_s < start) ++trace_pos;
      while (trace_pos < trace.size() && trace[trace_pos].timestamp_s < end) frames.push_back(trace[trace_pos++]);
    }

    WindowRecord rec;
    rec.window_id = w;
    rec.start_s = start;
    rec.env_label = config.env_at(start).label;
    rec.f1 = score_f1(frames);
    rec.frame_count = static_cast<int>(frames.size());

    // A retraining finishing inside this window lands before the window's
    // data reaches the edge.
    if (sim.settle(end)) policy->on_retraining_complete(sim);

    WindowContext ctx{w, start, end, frames, rec};
    if (!frames.empty()) policy->on_window(sim, ctx);

    auto& scored = sim.emit(end, EventKind::kWindowScored, w);
    scored.values = {{"f1", rec.f1},
                     {"edge_accuracy", rec.edge_accuracy},
                     {"low_conf", rec.low_conf_count},
                     {"uploaded", rec.uploaded_count}};
    scored.note = rec.env_label;
    out.windows.push_back(std::move(rec));
  }
  sim.abandon(windows * config.window_length_s);

  std::stable_sort(out.log.events.begin(), out.log.events.end(),
                   [](const Event& a, const Event& b) { return a.time_s < b.time_s; });
  std::stable_sort(out.retrainings.begin(), out.retrainings.end(),
                   [](const RetrainingRecord& a, const RetrainingRecord& b) { return a.retraining_id < b.retraining_id; });
  return out;
}

}  // namespace edgeretrain
