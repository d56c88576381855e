#include <gtest/gtest.h>

#include <algorithm>

#include "edgeretrain/extractor.hpp"
#include "edgeretrain/rng.hpp"

using namespace edgeretrain;

namespace {

FrameRecord frame_with(FrameId id, std::vector<double> confidences, double diff = 1.0) {
  FrameRecord f;
  f.frame_id = id;
  f.timestamp_s = static_cast<double>(id) / 30.0;
  for (double c : confidences) f.detections.push_back({c, true});
  f.frame_diff = diff;
  return f;
}

// Frame whose low-confidence ratio is exactly low/total at threshold 0.5.
FrameRecord frame_with_ratio(FrameId id, int low, int total, double diff) {
  std::vector<double> confs;
  for (int i = 0; i < total; ++i) confs.push_back(i < low ? 0.2 : 0.9);
  return frame_with(id, confs, diff);
}

// Filter, sort everything, truncate.
std::vector<FrameId> naive_extract(const std::vector<FrameRecord>& window, double beta, double threshold,
                                   int capacity) {
  std::vector<FrameRecord> kept;
  for (const auto& f : window) {
    if (low_conf_ratio(f, threshold) > beta) kept.push_back(f);
  }
  std::vector<FrameId> out;
  if (static_cast<int>(kept.size()) <= capacity) {
    for (const auto& f : kept) out.push_back(f.frame_id);
    return out;
  }
  std::sort(kept.begin(), kept.end(), [](const FrameRecord& a, const FrameRecord& b) {
    if (a.frame_diff != b.frame_diff) return a.frame_diff > b.frame_diff;
    return a.frame_id < b.frame_id;
  });
  for (int i = 0; i < capacity; ++i) out.push_back(kept[static_cast<std::size_t>(i)].frame_id);
  return out;
}

std::vector<FrameRecord> random_window(Rng& rng) {
  std::vector<FrameRecord> w;
  const int n = static_cast<int>(rng.uniform_int(0, 300));
  for (int i = 0; i < n; ++i) {
    std::vector<double> confs;
    const int dets = static_cast<int>(rng.uniform_int(0, 6));
    for (int d = 0; d < dets; ++d) confs.push_back(rng.uniform());
    // Coarse diffs so ties are common.
    w.push_back(frame_with(i, confs, static_cast<double>(rng.uniform_int(0, 20)) / 4.0));
  }
  return w;
}

}  // namespace

TEST(LowConfRatio, Examples) {
  EXPECT_DOUBLE_EQ(low_conf_ratio(frame_with(0, {0.9, 0.3, 0.4}), 0.5), 2.0 / 3.0);
  EXPECT_EQ(low_conf_ratio(frame_with(0, {}), 0.5), 0.0);
  EXPECT_EQ(low_conf_ratio(frame_with(0, {}), 0.0), 0.0);
  EXPECT_EQ(low_conf_ratio(frame_with(0, {0.1, 0.2}), 0.5), 1.0);
  // Strictly below the cut.
  EXPECT_EQ(low_conf_ratio(frame_with(0, {0.5}), 0.5), 0.0);
}

TEST(Capacity, Examples) {
  EXPECT_EQ(capacity_for_bandwidth(10, 2, 10, 0.5), 25);
  EXPECT_EQ(capacity_for_bandwidth(2, 2, 10, 1.0), 10);
  EXPECT_EQ(capacity_for_bandwidth(0, 2, 10, 0.5), 0);
  EXPECT_EQ(capacity_for_bandwidth(1e-9, 2, 10, 0.5), 0);
  EXPECT_EQ(capacity_for_bandwidth(2, 0.25, 10, 0.5), 40);
}

TEST(Extract, WorkedExample) {
  // Ratios 0.5, 0.3, 0.6, 0.45 with beta 0.4: f1, f3, f4 pass.
  const std::vector<FrameRecord> window = {
      frame_with_ratio(1, 1, 2, 10.0),
      frame_with_ratio(2, 3, 10, 50.0),
      frame_with_ratio(3, 3, 5, 12.0),
      frame_with_ratio(4, 9, 20, 7.0),
  };
  const auto r = extract(window, 0.4, 0.5, 2);
  EXPECT_EQ(r.low_conf_set, (std::vector<FrameId>{1, 3, 4}));
  EXPECT_EQ(r.selected, (std::vector<FrameId>{3, 1}));
  EXPECT_EQ(r.capacity, 2);
}

TEST(Extract, UnderCapacityKeepsWindowOrder) {
  const std::vector<FrameRecord> window = {frame_with_ratio(1, 1, 1, 1.0), frame_with_ratio(2, 1, 1, 9.0)};
  EXPECT_EQ(extract(window, 0.4, 0.5, 5).selected, (std::vector<FrameId>{1, 2}));
}

TEST(Extract, EmptyAndAllFiltered) {
  const auto empty = extract({}, 0.4, 0.5, 10);
  EXPECT_TRUE(empty.selected.empty());
  EXPECT_TRUE(empty.low_conf_set.empty());

  const std::vector<FrameRecord> window = {frame_with_ratio(1, 2, 5, 3.0), frame_with_ratio(2, 0, 3, 4.0),
                                           frame_with(3, {})};
  const auto r = extract(window, 0.4, 0.5, 100);
  EXPECT_TRUE(r.selected.empty());
  EXPECT_TRUE(r.low_conf_set.empty());
}

TEST(Extract, RatioEqualToBetaIsExcluded) {
  const std::vector<FrameRecord> window = {frame_with_ratio(1, 2, 5, 3.0)};
  EXPECT_TRUE(extract(window, 0.4, 0.5, 10).low_conf_set.empty());
}

TEST(Extract, TiesBrokenByLowerFrameId) {
  const std::vector<FrameRecord> window = {frame_with_ratio(7, 1, 1, 2.0), frame_with_ratio(3, 1, 1, 2.0),
                                           frame_with_ratio(5, 1, 1, 2.0)};
  EXPECT_EQ(extract(window, 0.4, 0.5, 2).selected, (std::vector<FrameId>{3, 5}));
}

TEST(ExtractProperty, MatchesSortOracle) {
  Rng rng(99);
  for (int i = 0; i < 500; ++i) {
    const auto window = random_window(rng);
    const double beta = rng.uniform();
    const int cap = static_cast<int>(rng.uniform_int(0, 80));
    const auto r = extract(window, beta, 0.5, cap);
    ASSERT_EQ(r.selected, naive_extract(window, beta, 0.5, cap)) << "case " << i;
  }
}

TEST(ExtractProperty, Invariants) {
  Rng rng(5);
  for (int i = 0; i < 300; ++i) {
    const auto window = random_window(rng);
    const double beta = rng.uniform();
    const int cap = static_cast<int>(rng.uniform_int(0, 60));
    const auto r = extract(window, beta, 0.5, cap);

    // Filtering soundness.
    for (const auto& f : window) {
      const bool in = std::find(r.low_conf_set.begin(), r.low_conf_set.end(), f.frame_id) != r.low_conf_set.end();
      ASSERT_EQ(in, low_conf_ratio(f, 0.5) > beta);
    }
    // Capacity and subset.
    ASSERT_EQ(r.selected.size(), std::min<std::size_t>(r.low_conf_set.size(), static_cast<std::size_t>(cap)));
    for (FrameId id : r.selected) {
      ASSERT_NE(std::find(r.low_conf_set.begin(), r.low_conf_set.end(), id), r.low_conf_set.end());
    }
    // Monotone in capacity.
    const auto bigger = extract(window, beta, 0.5, cap + static_cast<int>(rng.uniform_int(1, 20)));
    for (FrameId id : r.selected) {
      ASSERT_NE(std::find(bigger.selected.begin(), bigger.selected.end(), id), bigger.selected.end());
    }
    // Purity: same input, same output.
    ASSERT_EQ(extract(window, beta, 0.5, cap).selected, r.selected);
  }
}
