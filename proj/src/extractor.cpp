#include "edgeretrain/extractor.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace edgeretrain {

double low_conf_ratio(const FrameRecord& frame, double conf_threshold) {
  if (frame.detections.empty()) return 0.0;
  int low = 0;
  for (const auto& d : frame.detections) {
    if (d.confidence < conf_threshold) ++low;
  }
  return static_cast<double>(low) / static_cast<double>(frame.detections.size());
}

int capacity_for_bandwidth(double up_mbps, double d0_mb, double window_length_s,
                           double uplink_budget_fraction) {
  if (!(up_mbps > 0.0) || !(d0_mb > 0.0) || !(window_length_s > 0.0) || !(uplink_budget_fraction > 0.0)) {
    return 0;
  }
  const double frames = uplink_budget_fraction * up_mbps * window_length_s / d0_mb;
  // Absorb representation error so that e.g. 0.5 * 10 * 10 / 2 lands on 25.
  const double c = std::floor(frames + 1e-9);
  if (c >= static_cast<double>(std::numeric_limits<int>::max())) return std::numeric_limits<int>::max();
  return static_cast<int>(c);
}

ExtractionResult extract(std::span<const FrameRecord> window, double beta, double conf_threshold,
                         int capacity) {
  ExtractionResult out;
  out.capacity = std::max(capacity, 0);

  // Step 1: low-confidence frames.
  std::vector<const FrameRecord*> low;
  for (const auto& f : window) {
    if (low_conf_ratio(f, conf_threshold) > beta) {
      low.push_back(&f);
      out.low_conf_set.push_back(f.frame_id);
    }
  }

  // Step 2: temporal redundancy removal under the bandwidth cap.
  if (static_cast<int>(low.size()) <= out.capacity) {
    out.selected = out.low_conf_set;
    return out;
  }
  auto by_diff = [](const FrameRecord* a, const FrameRecord* b) {
    if (a->frame_diff != b->frame_diff) return a->frame_diff > b->frame_diff;
    return a->frame_id < b->frame_id;
  };
  std::partial_sort(low.begin(), low.begin() + out.capacity, low.end(), by_diff);
  out.selected.reserve(out.capacity);
  for (int i = 0; i < out.capacity; ++i) out.selected.push_back(low[i]->frame_id);
  return out;
}

}  // namespace edgeretrain
