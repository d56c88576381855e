#include "edgeretrain/trigger.hpp"

#include <cmath>
#include <stdexcept>

#include "edgeretrain/stats.hpp"

namespace edgeretrain {

void WindowHistory::append(WindowSummary window) {
  accuracies_.push_back(window.accuracy);
  windows_.push_back(std::move(window));
}

void WindowHistory::clear() {
  windows_.clear();
  accuracies_.clear();
}

std::vector<double> decay_weights(int count, double gamma) {
  if (count < 1) throw std::invalid_argument("decay_weights: count must be >= 1");
  std::vector<double> w(static_cast<std::size_t>(count));
  // Newest gets 1, built backwards so no pow() drift between neighbours.
  double g = 1.0;
  double sum = 0.0;
  for (int i = count - 1; i >= 0; --i) {
    w[static_cast<std::size_t>(i)] = g;
    sum += g;
    g *= gamma;
  }
  for (double& x : w) x /= sum;
  return w;
}

TriggerStats trigger_stats(std::span<const double> previous, double gamma, bool weighted_sigma) {
  if (previous.size() < 2) throw std::invalid_argument("trigger_stats: need at least two windows");
  const auto weights = decay_weights(static_cast<int>(previous.size()), gamma);
  TriggerStats s;
  for (std::size_t i = 0; i < previous.size(); ++i) s.weighted_mean += weights[i] * previous[i];
  if (weighted_sigma) {
    double var = 0.0;
    for (std::size_t i = 0; i < previous.size(); ++i) {
      const double d = previous[i] - s.weighted_mean;
      var += weights[i] * d * d;
    }
    s.stddev = std::sqrt(var);
  } else {
    s.stddev = sample_stddev(previous);
  }
  return s;
}

bool should_trigger(std::span<const double> previous, double current_accuracy, double gamma, bool weighted_sigma) {
  if (previous.size() < 2) return false;
  const auto s = trigger_stats(previous, gamma, weighted_sigma);
  return s.weighted_mean - s.stddev > current_accuracy;
}

bool should_trigger(const WindowHistory& history, double current_accuracy, double gamma, bool weighted_sigma) {
  return should_trigger(std::span<const double>(history.accuracies()), current_accuracy, gamma, weighted_sigma);
}

void record_window(WindowHistory& history, Buffer& buffer, WindowSummary window,
                   std::span<const FrameRecord> labeled_frames) {
  history.append(std::move(window));
  buffer.frames.insert(buffer.frames.end(), labeled_frames.begin(), labeled_frames.end());
}

void reset_cycle(WindowHistory& history, Buffer& buffer) {
  history.clear();
  buffer.frames.clear();
}

}  // namespace edgeretrain
