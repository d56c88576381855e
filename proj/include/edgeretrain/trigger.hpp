#ifndef EDGERETRAIN_TRIGGER_HPP_
#define EDGERETRAIN_TRIGGER_HPP_

#include <span>
#include <vector>

#include "edgeretrain/types.hpp"

namespace edgeretrain {

// Windows received since the last completed retraining.
class WindowHistory {
 public:
  void append(WindowSummary window);
  void clear();

  const std::vector<WindowSummary>& windows() const { return windows_; }
  const std::vector<double>& accuracies() const { return accuracies_; }
  std::size_t size() const { return windows_.size(); }
  bool empty() const { return windows_.empty(); }

 private:
  std::vector<WindowSummary> windows_;
  std::vector<double> accuracies_;
};

// Labeled key frames from non-trigger windows, drained by the next retraining.
struct Buffer {
  std::vector<FrameRecord> frames;

  std::size_t size() const { return frames.size(); }
  bool empty() const { return frames.empty(); }
};

// Normalized exponential-decay weights, oldest first: w_i ~ gamma^(count - i).
std::vector<double> decay_weights(int count, double gamma);

struct TriggerStats {
  double weighted_mean = 0.0;
  double stddev = 0.0;
};

// Weighted mean and sample standard deviation of the given accuracies.
// Requires at least two values. With weighted_sigma the spread uses the same
// decay weights as the mean instead of the unweighted (n - 1) estimate.
TriggerStats trigger_stats(std::span<const double> previous, double gamma, bool weighted_sigma = false);

// Fires when (weighted mean - stddev) of the previous windows strictly exceeds
// the current window's accuracy. Never fires with fewer than two previous
// windows.
bool should_trigger(std::span<const double> previous, double current_accuracy, double gamma,
                    bool weighted_sigma = false);
bool should_trigger(const WindowHistory& history, double current_accuracy, double gamma,
                    bool weighted_sigma = false);

void record_window(WindowHistory& history, Buffer& buffer, WindowSummary window,
                   std::span<const FrameRecord> labeled_frames);

void reset_cycle(WindowHistory& history, Buffer& buffer);

}  // namespace edgeretrain

#endif  // EDGERETRAIN_TRIGGER_HPP_
