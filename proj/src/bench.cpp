#include "edgeretrain/bench.hpp"

#include <algorithm>
#include <charconv>
#include <string>

namespace edgeretrain {

std::optional<PlannerGrid> parse_grid(std::string_view spec) {
  int values[3] = {0, 0, 0};
  const char* p = spec.data();
  const char* end = spec.data() + spec.size();
  for (int i = 0; i < 3; ++i) {
    auto [next, ec] = std::from_chars(p, end, values[i]);
    if (ec != std::errc() || values[i] < 1) return std::nullopt;
    p = next;
    if (i < 2) {
      if (p == end || (*p != 'x' && *p != 'X')) return std::nullopt;
      ++p;
    }
  }
  if (p != end) return std::nullopt;
  return PlannerGrid{values[0], values[1], values[2]};
}

PlannerInput random_planner_instance(const PlannerGrid& grid, Rng& rng) {
  PlannerInput in;
  in.e_min = static_cast<int>(rng.uniform_int(1, 10));
  in.e_max = in.e_min + grid.epochs - 1;
  in.n_min = static_cast<int>(rng.uniform_int(10, 80));
  in.available_frames = in.n_min + grid.frames - 1;
  in.window_frame_count = 300;
  in.trigger_low_conf_count = static_cast<int>(rng.uniform_int(0, 300));
  in.trigger_selected_count = static_cast<int>(rng.uniform_int(0, 60));
  in.up_mbps = rng.uniform(0.5, 4.0);
  in.down_mbps = rng.uniform(5.0, 40.0);
  in.d0_mb = 0.25;
  in.t0_s = 0.05;
  in.m0_mb = 4.0;
  for (int t = 0; t < grid.teachers; ++t) {
    TeacherProfile p;
    p.teacher_id = "t" + std::to_string(t);
    p.latency_slope_s = rng.uniform(0.002, 0.015);
    p.acc_floor = rng.uniform(0.3, 0.5);
    p.acc_ceiling = rng.uniform(0.7, 0.95);
    p.acc_rate = rng.uniform(100.0, 1500.0);
    in.teachers.push_back(p);
  }

  // Budget somewhere between the cheapest and the most expensive config so
  // the latency constraint is live but satisfiable.
  double min_t = 0.0;
  double max_t = 0.0;
  bool first = true;
  for (const auto& t : in.teachers) {
    RetrainConfig lo{in.e_min, in.n_min, t.teacher_id};
    RetrainConfig hi{in.e_max, in.available_frames, t.teacher_id};
    const double a = predict_latency(lo, in).total();
    const double b = predict_latency(hi, in).total();
    min_t = first ? a : std::min(min_t, a);
    max_t = first ? b : std::max(max_t, b);
    first = false;
  }
  in.tau0_s = min_t + rng.uniform(0.2, 1.0) * (max_t - min_t);
  return in;
}

}  // namespace edgeretrain
