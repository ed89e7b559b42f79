#pragma once

namespace evidence::numkit {

inline constexpr double kLogTwoPi = 1.8378770664093454835606594728112;
inline constexpr double kLogSqrtTwoPi = 0.91893853320467274178032973640562;

// Standard normal CDF and its logarithm. log_norm_cdf stays finite for
// arbitrarily negative arguments (asymptotic series below -37).
double norm_cdf(double x);
double log_norm_cdf(double x);
// Inverse of norm_cdf on (0, 1).
double norm_quantile(double p);

// d/dx log Phi(x) = phi(x) / Phi(x), evaluated without cancellation.
double inverse_mills(double x);

// log(1 + exp(x)) without overflow.
double log1p_exp(double x);
// Logistic sigmoid 1 / (1 + exp(-x)).
double logistic(double x);

// Multivariate log-gamma: log Gamma_p(a).
double log_multigamma(double a, int p);

}  // namespace evidence::numkit
