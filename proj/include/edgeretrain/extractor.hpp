#ifndef EDGERETRAIN_EXTRACTOR_HPP_
#define EDGERETRAIN_EXTRACTOR_HPP_

#include <span>
#include <vector>

#include "edgeretrain/types.hpp"

namespace edgeretrain {

struct ExtractionResult {
  std::vector<FrameId> selected;      // descending frame_diff when pruned
  std::vector<FrameId> low_conf_set;  // window order
  int capacity = 0;
};

// Fraction of detections with confidence strictly below the threshold; 0 for
// a frame without detections.
double low_conf_ratio(const FrameRecord& frame, double conf_threshold);

// Frames that fit in uplink_budget_fraction of one window's uplink volume.
int capacity_for_bandwidth(double up_mbps, double d0_mb, double window_length_s,
                           double uplink_budget_fraction);

// Two-step key frame extraction.
//  1. Keep frames whose low-confidence ratio exceeds beta (strictly).
//  2. If more than `capacity` remain, keep the `capacity` frames with the
//     largest frame_diff, ordered by frame_diff descending, ties broken by
//     lower frame_id.
ExtractionResult extract(std::span<const FrameRecord> window, double beta, double conf_threshold,
                         int capacity);

}  // namespace edgeretrain

#endif  // EDGERETRAIN_EXTRACTOR_HPP_
