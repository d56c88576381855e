#ifndef EDGERETRAIN_STATS_HPP_
#define EDGERETRAIN_STATS_HPP_

#include <span>

namespace edgeretrain {

double mean(std::span<const double> xs);

// Unbiased (n - 1) standard deviation; 0 for fewer than two samples.
double sample_stddev(std::span<const double> xs);

double percentile(std::span<const double> xs, double q);

}  // namespace edgeretrain

#endif  // EDGERETRAIN_STATS_HPP_
