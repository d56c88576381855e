#ifndef EDGERETRAIN_METRICS_HPP_
#define EDGERETRAIN_METRICS_HPP_

#include <array>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "edgeretrain/orchestrator.hpp"

namespace edgeretrain {

enum class TimePart { kTransmission, kLabeling, kTraining, kModelUpdate, kProfiler };
inline constexpr std::size_t kTimePartCount = 5;
std::string_view time_part_name(TimePart part);

struct RunMetrics {
  SchemeKind scheme = SchemeKind::kProposed;
  std::uint64_t seed = 0;
  std::vector<double> f1_series;
  double mean_f1 = 0.0;
  double std_f1 = 0.0;
  int retrainings = 0;            // started, including abandoned ones
  int completed_retrainings = 0;
  double total_retraining_s = 0.0;  // completed retrainings only
  std::array<double, kTimePartCount> part_s{};
  std::array<double, kTimePartCount> part_pct{};  // all zero when no time was spent
  double uplink_mb = 0.0;
  int infeasible_plans = 0;
};

RunMetrics compute_metrics(const RunResult& run);

// Sum of the latency parts over completed retrainings, read back from the
// plan_chosen events rather than the retraining records.
std::array<double, kTimePartCount> logged_part_totals(const RunResult& run);

struct Aggregate {
  double mean = 0.0;
  double std = 0.0;
  int count = 0;
};

Aggregate aggregate(std::span<const double> values);

// One scheme over many seeds.
struct SchemeSummary {
  SchemeKind scheme = SchemeKind::kProposed;
  Aggregate mean_f1;
  Aggregate std_f1;
  Aggregate retrainings;
  Aggregate total_retraining_s;
  std::array<Aggregate, kTimePartCount> part_pct;
  Aggregate uplink_mb;
};

SchemeSummary summarize(SchemeKind scheme, std::span<const RunMetrics> runs);

// Names of the metrics emitted per scheme in the comparison table.
std::vector<std::string> summary_metric_names();
std::vector<std::pair<std::string, Aggregate>> summary_metrics(const SchemeSummary& s);

std::string format_number(double x);

void write_events_ndjson(std::ostream& out, const EventLog& log);
void write_windows_csv(std::ostream& out, const RunResult& run);
void write_retrainings_csv(std::ostream& out, const RunResult& run);
void write_run_summary_json(std::ostream& out, const RunMetrics& m);

void write_runs_csv(std::ostream& out, std::span<const RunMetrics> runs);
// Long format: one row per (scheme, metric).
void write_compare_table_csv(std::ostream& out, std::span<const SchemeSummary> summaries);

}  // namespace edgeretrain

#endif  // EDGERETRAIN_METRICS_HPP_
