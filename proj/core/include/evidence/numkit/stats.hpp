#pragma once

#include <span>
#include <vector>

namespace evidence::numkit {

// log(sum(exp(v))). Throws InvalidArgument on an empty span.
double log_sum_exp(std::span<const double> values);
// log(mean(exp(v))).
double log_mean_exp(std::span<const double> values);

double mean(std::span<const double> values);
// Sample variance with denominator n - 1 (0 for n < 2).
double variance(std::span<const double> values);
double stddev(std::span<const double> values);

// Means of `n_batches` contiguous batches; the tail that does not fill a
// batch is dropped.
std::vector<double> batch_means(std::span<const double> values, std::size_t n_batches);

// Monte Carlo standard error of the sample mean via non-overlapping batch
// means.
double batch_means_se(std::span<const double> values, std::size_t n_batches);

}  // namespace evidence::numkit
