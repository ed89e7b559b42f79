#include "evidence/numkit/stats.hpp"

#include "evidence/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace evidence::numkit {

double log_sum_exp(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("log_sum_exp: empty input");
  const double m = *std::max_element(values.begin(), values.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double v : values) s += std::exp(v - m);
  return m + std::log(s);
}

double log_mean_exp(std::span<const double> values) {
  return log_sum_exp(values) - std::log(static_cast<double>(values.size()));
}

double mean(std::span<const double> values) {
  if (values.empty()) throw InvalidArgument("mean: empty input");
  double s = 0.0;
  for (double v : values) s += v;
  return s / static_cast<double>(values.size());
}

double variance(std::span<const double> values) {
  if (values.size() < 2) return 0.0;
  const double m = mean(values);
  double s = 0.0;
  for (double v : values) s += (v - m) * (v - m);
  return s / static_cast<double>(values.size() - 1);
}

double stddev(std::span<const double> values) { return std::sqrt(variance(values)); }

std::vector<double> batch_means(std::span<const double> values, std::size_t n_batches) {
  if (n_batches == 0) throw InvalidArgument("batch_means: need at least one batch");
  const std::size_t size = values.size() / n_batches;
  if (size == 0) throw InvalidArgument("batch_means: fewer values than batches");
  std::vector<double> out(n_batches);
  for (std::size_t b = 0; b < n_batches; ++b) out[b] = mean(values.subspan(b * size, size));
  return out;
}

double batch_means_se(std::span<const double> values, std::size_t n_batches) {
  const std::vector<double> bm = batch_means(values, n_batches);
  return std::sqrt(variance(bm) / static_cast<double>(n_batches));
}

}  // namespace evidence::numkit
