#ifndef EDGERETRAIN_TRACE_HPP_
#define EDGERETRAIN_TRACE_HPP_

#include <filesystem>
#include <iosfwd>
#include <span>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "edgeretrain/types.hpp"

namespace edgeretrain {

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Newline-delimited JSON, one frame per line:
//   {"frame_id":0,"timestamp_s":0.0,"confidences":[0.9,0.3],"frame_diff":1.2,
//    "oracle_object_count":2,"true_positive":[true,false]}
// "true_positive" is optional. Without it the highest-confidence detections,
// up to oracle_object_count of them, count as true positives.
std::vector<FrameRecord> parse_trace(std::istream& in);
std::vector<FrameRecord> load_trace(const std::filesystem::path& path);

void write_trace(std::ostream& out, std::span<const FrameRecord> frames);

}  // namespace edgeretrain

#endif  // EDGERETRAIN_TRACE_HPP_
