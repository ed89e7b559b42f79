#pragma once

#include "evidence/numkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

namespace evidence::mc::detail {

// Batch-means standard error that degrades to 0 when there are too few values.
inline double batch_se(std::span<const double> v, std::size_t batches) {
  const std::size_t b = std::min(batches, v.size());
  if (b < 2) return 0.0;
  return numkit::batch_means_se(v.first((v.size() / b) * b), b);
}

// Standard error of log(mean(exp(v))) by batch means and the delta method.
inline double log_mean_exp_se(std::span<const double> v, std::size_t batches) {
  if (v.empty()) return 0.0;
  const double top = *std::max_element(v.begin(), v.end());
  std::vector<double> scaled(v.size());
  std::transform(v.begin(), v.end(), scaled.begin(), [top](double x) { return std::exp(x - top); });
  const double m = numkit::mean(scaled);
  return batch_se(scaled, batches) / m;
}

}  // namespace evidence::mc::detail
