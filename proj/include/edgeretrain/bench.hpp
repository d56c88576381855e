#ifndef EDGERETRAIN_BENCH_HPP_
#define EDGERETRAIN_BENCH_HPP_

#include <optional>
#include <string_view>

#include "edgeretrain/planner.hpp"
#include "edgeretrain/rng.hpp"

namespace edgeretrain {

// Size of the planner search space: distinct epoch values, distinct frame
// counts, teachers.
struct PlannerGrid {
  int epochs = 20;
  int frames = 20;
  int teachers = 3;

  long size() const { return static_cast<long>(epochs) * frames * teachers; }
};

// Parses "20x20x3".
std::optional<PlannerGrid> parse_grid(std::string_view spec);

// Random planner instance whose search space is exactly `grid` and which has
// at least one configuration within the latency budget.
PlannerInput random_planner_instance(const PlannerGrid& grid, Rng& rng);

}  // namespace edgeretrain

#endif  // EDGERETRAIN_BENCH_HPP_
