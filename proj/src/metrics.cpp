#include "edgeretrain/metrics.hpp"

#include <algorithm>
#include <cstdio>
#include <ostream>

#include "edgeretrain/stats.hpp"
#include "json.hpp"

namespace edgeretrain {

using nlohmann::json;

std::string_view time_part_name(TimePart part) {
  switch (part) {
    case TimePart::kTransmission: return "transmission";
    case TimePart::kLabeling: return "labeling";
    case TimePart::kTraining: return "training";
    case TimePart::kModelUpdate: return "model_update";
    case TimePart::kProfiler: return "profiler";
  }
  return "?";
}

namespace {

std::array<double, kTimePartCount> parts_of(const RetrainingRecord& r) {
  return {r.latency.transmission_s, r.latency.labeling_s, r.latency.training_s, r.latency.model_update_s,
          r.profiler_s};
}

}  // namespace

RunMetrics compute_metrics(const RunResult& run) {
  RunMetrics m;
  m.scheme = run.scheme;
  m.seed = run.seed;
  for (const auto& w : run.windows) m.f1_series.push_back(w.f1);
  m.mean_f1 = mean(m.f1_series);
  m.std_f1 = sample_stddev(m.f1_series);
  m.retrainings = static_cast<int>(run.retrainings.size());
  for (const auto& r : run.retrainings) {
    if (!r.completed) continue;
    ++m.completed_retrainings;
    const auto parts = parts_of(r);
    for (std::size_t i = 0; i < kTimePartCount; ++i) m.part_s[i] += parts[i];
  }
  for (double p : m.part_s) m.total_retraining_s += p;
  if (m.total_retraining_s > 0.0) {
    for (std::size_t i = 0; i < kTimePartCount; ++i) m.part_pct[i] = 100.0 * m.part_s[i] / m.total_retraining_s;
  }
  m.uplink_mb = run.uplink_mb;
  m.infeasible_plans = run.infeasible_plans;
  return m;
}

std::array<double, kTimePartCount> logged_part_totals(const RunResult& run) {
  std::array<double, kTimePartCount> totals{};
  static constexpr const char* kKeys[kTimePartCount] = {"transmission_s", "labeling_s", "training_s",
                                                        "model_update_s", "profiler_s"};
  std::vector<int> completed;
  for (const auto& e : run.log.events) {
    if (e.kind == EventKind::kRetrainingCompleted) completed.push_back(e.retraining_id);
  }
  for (const auto& e : run.log.events) {
    if (e.kind != EventKind::kPlanChosen) continue;
    if (std::find(completed.begin(), completed.end(), e.retraining_id) == completed.end()) continue;
    for (const auto& [key, value] : e.values) {
      for (std::size_t i = 0; i < kTimePartCount; ++i) {
        if (key == kKeys[i]) totals[i] += value;
      }
    }
  }
  return totals;
}

Aggregate aggregate(std::span<const double> values) {
  return {mean(values), sample_stddev(values), static_cast<int>(values.size())};
}

SchemeSummary summarize(SchemeKind scheme, std::span<const RunMetrics> runs) {
  SchemeSummary s;
  s.scheme = scheme;
  std::vector<double> mf, sf, rc, tt, up;
  std::array<std::vector<double>, kTimePartCount> pct;
  for (const auto& r : runs) {
    if (r.scheme != scheme) continue;
    mf.push_back(r.mean_f1);
    sf.push_back(r.std_f1);
    rc.push_back(r.retrainings);
    tt.push_back(r.total_retraining_s);
    up.push_back(r.uplink_mb);
    for (std::size_t i = 0; i < kTimePartCount; ++i) pct[i].push_back(r.part_pct[i]);
  }
  s.mean_f1 = aggregate(mf);
  s.std_f1 = aggregate(sf);
  s.retrainings = aggregate(rc);
  s.total_retraining_s = aggregate(tt);
  s.uplink_mb = aggregate(up);
  for (std::size_t i = 0; i < kTimePartCount; ++i) s.part_pct[i] = aggregate(pct[i]);
  return s;
}

std::vector<std::pair<std::string, Aggregate>> summary_metrics(const SchemeSummary& s) {
  std::vector<std::pair<std::string, Aggregate>> out = {
      {"mean_f1", s.mean_f1},
      {"std_f1", s.std_f1},
      {"retrainings", s.retrainings},
      {"total_retraining_s", s.total_retraining_s},
      {"uplink_mb", s.uplink_mb},
  };
  for (std::size_t i = 0; i < kTimePartCount; ++i) {
    out.emplace_back(std::string(time_part_name(static_cast<TimePart>(i))) + "_pct", s.part_pct[i]);
  }
  return out;
}

std::vector<std::string> summary_metric_names() {
  std::vector<std::string> names;
  for (const auto& [name, _] : summary_metrics(SchemeSummary{})) names.push_back(name);
  return names;
}

std::string format_number(double x) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", x);
  return buf;
}

void write_events_ndjson(std::ostream& out, const EventLog& log) {
  for (const auto& e : log.events) {
    json j;
    j["time_s"] = e.time_s;
    j["event"] = std::string(event_kind_name(e.kind));
    if (e.window_id >= 0) j["window_id"] = e.window_id;
    if (e.retraining_id >= 0) j["retraining_id"] = e.retraining_id;
    for (const auto& [key, value] : e.values) j[key] = value;
    if (!e.note.empty()) j["note"] = e.note;
    out << j.dump() << '\n';
  }
}

void write_windows_csv(std::ostream& out, const RunResult& run) {
  out << "window_id,start_s,env_label,f1,edge_accuracy,frames,low_conf,uploaded,triggered\n";
  for (const auto& w : run.windows) {
    out << w.window_id << ',' << format_number(w.start_s) << ',' << w.env_label << ',' << format_number(w.f1) << ','
        << format_number(w.edge_accuracy) << ',' << w.frame_count << ',' << w.low_conf_count << ','
        << w.uploaded_count << ',' << (w.triggered ? 1 : 0) << '\n';
  }
}

void write_retrainings_csv(std::ostream& out, const RunResult& run) {
  out << "retraining_id,trigger_window,start_s,completion_s,completed,env_label,epochs,frame_count,teacher_id,"
         "urgency,utility,predicted_accuracy,transmission_s,labeling_s,training_s,model_update_s,profiler_s,"
         "total_s\n";
  for (const auto& r : run.retrainings) {
    out << r.retraining_id << ',' << r.trigger_window << ',' << format_number(r.start_s) << ','
        << format_number(r.completion_s) << ',' << (r.completed ? 1 : 0) << ',' << r.env_label << ','
        << r.config.epochs << ',' << r.config.frame_count << ',' << r.config.teacher_id << ','
        << format_number(r.urgency) << ',' << format_number(r.utility) << ',' << format_number(r.predicted_accuracy)
        << ',' << format_number(r.latency.transmission_s) << ',' << format_number(r.latency.labeling_s) << ','
        << format_number(r.latency.training_s) << ',' << format_number(r.latency.model_update_s) << ','
        << format_number(r.profiler_s) << ',' << format_number(r.total_s()) << '\n';
  }
}

void write_run_summary_json(std::ostream& out, const RunMetrics& m) {
  json j;
  j["scheme"] = std::string(scheme_name(m.scheme));
  j["seed"] = m.seed;
  j["windows"] = m.f1_series.size();
  j["mean_f1"] = m.mean_f1;
  j["std_f1"] = m.std_f1;
  j["retrainings"] = m.retrainings;
  j["completed_retrainings"] = m.completed_retrainings;
  j["total_retraining_s"] = m.total_retraining_s;
  json parts = json::object();
  json pct = json::object();
  for (std::size_t i = 0; i < kTimePartCount; ++i) {
    const std::string name(time_part_name(static_cast<TimePart>(i)));
    parts[name] = m.part_s[i];
    pct[name] = m.part_pct[i];
  }
  j["time_s"] = parts;
  j["time_pct"] = pct;
  j["uplink_mb"] = m.uplink_mb;
  j["infeasible_plans"] = m.infeasible_plans;
  out << j.dump(2) << '\n';
}

void write_runs_csv(std::ostream& out, std::span<const RunMetrics> runs) {
  out << "scheme,seed,mean_f1,std_f1,retrainings,completed_retrainings,total_retraining_s";
  for (std::size_t i = 0; i < kTimePartCount; ++i) out << ',' << time_part_name(static_cast<TimePart>(i)) << "_s";
  out << ",uplink_mb,infeasible_plans\n";
  for (const auto& m : runs) {
    out << scheme_name(m.scheme) << ',' << m.seed << ',' << format_number(m.mean_f1) << ','
        << format_number(m.std_f1) << ',' << m.retrainings << ',' << m.completed_retrainings << ','
        << format_number(m.total_retraining_s);
    for (double p : m.part_s) out << ',' << format_number(p);
    out << ',' << format_number(m.uplink_mb) << ',' << m.infeasible_plans << '\n';
  }
}

void write_compare_table_csv(std::ostream& out, std::span<const SchemeSummary> summaries) {
  out << "scheme,metric,mean,std,seeds\n";
  for (const auto& s : summaries) {
    for (const auto& [name, agg] : summary_metrics(s)) {
      out << scheme_name(s.scheme) << ',' << name << ',' << format_number(agg.mean) << ',' << format_number(agg.std)
          << ',' << agg.count << '\n';
    }
  }
}

}  // namespace edgeretrain
