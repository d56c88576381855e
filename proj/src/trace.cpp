#include "edgeretrain/trace.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <numeric>
#include <ostream>
#include <string>

#include "json.hpp"

namespace edgeretrain {

using nlohmann::json;

namespace {

FrameRecord parse_line(const std::string& line, long line_no) {
  const std::string where = "trace line " + std::to_string(line_no);
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw TraceError(where + ": " + e.what());
  }
  FrameRecord f;
  std::vector<double> conf;
  std::vector<bool> truth;
  try {
    f.frame_id = j.at("frame_id").get<FrameId>();
    f.timestamp_s = j.at("timestamp_s").get<double>();
    conf = j.at("confidences").get<std::vector<double>>();
    f.frame_diff = j.at("frame_diff").get<double>();
    f.oracle_object_count = j.at("oracle_object_count").get<int>();
    if (j.contains("true_positive")) truth = j.at("true_positive").get<std::vector<bool>>();
  } catch (const json::exception& e) {
    throw TraceError(where + ": " + e.what());
  }

  if (!(f.frame_diff >= 0.0)) throw TraceError(where + ": frame_diff must be >= 0");
  if (f.oracle_object_count < 0) throw TraceError(where + ": oracle_object_count must be >= 0");
  for (double c : conf) {
    if (!(c >= 0.0 && c <= 1.0)) throw TraceError(where + ": confidence out of [0,1]");
  }
  if (!truth.empty() && truth.size() != conf.size()) {
    throw TraceError(where + ": true_positive must align with confidences");
  }

  if (truth.empty()) {
    std::vector<std::size_t> order(conf.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return conf[a] > conf[b]; });
    truth.assign(conf.size(), false);
    const auto tp = std::min(order.size(), static_cast<std::size_t>(f.oracle_object_count));
    for (std::size_t i = 0; i < tp; ++i) truth[order[i]] = true;
  } else if (std::count(truth.begin(), truth.end(), true) > f.oracle_object_count) {
    throw TraceError(where + ": more true positives than oracle objects");
  }

  f.detections.reserve(conf.size());
  for (std::size_t i = 0; i < conf.size(); ++i) f.detections.push_back({conf[i], truth[i]});
  return f;
}

}  // namespace

std::vector<FrameRecord> parse_trace(std::istream& in) {
  std::vector<FrameRecord> frames;
  std::string line;
  long line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    FrameRecord f = parse_line(line, line_no);
    if (!frames.empty()) {
      if (!(f.timestamp_s > frames.back().timestamp_s)) {
        throw TraceError("trace line " + std::to_string(line_no) + ": timestamps must be strictly increasing");
      }
      if (!(f.frame_id > frames.back().frame_id)) {
        throw TraceError("trace line " + std::to_string(line_no) + ": frame ids must be increasing");
      }
    }
    frames.push_back(std::move(f));
  }
  return frames;
}

std::vector<FrameRecord> load_trace(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw TraceError("cannot open trace file: " + path.string());
  return parse_trace(in);
}

void write_trace(std::ostream& out, std::span<const FrameRecord> frames) {
  for (const auto& f : frames) {
    json j;
    j["frame_id"] = f.frame_id;
    j["timestamp_s"] = f.timestamp_s;
    json conf = json::array();
    json truth = json::array();
    for (const auto& d : f.detections) {
      conf.push_back(d.confidence);
      truth.push_back(d.is_true_positive);
    }
    j["confidences"] = conf;
    j["frame_diff"] = f.frame_diff;
    j["oracle_object_count"] = f.oracle_object_count;
    j["true_positive"] = truth;
    out << j.dump() << '\n';
  }
}

}  // namespace edgeretrain
