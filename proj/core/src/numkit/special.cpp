#include "evidence/numkit/special.hpp"

#include "evidence/errors.hpp"

#include <boost/math/special_functions/erf.hpp>

#include <cmath>
#include <limits>

namespace evidence::numkit {

namespace {
constexpr double kSqrtHalf = 0.70710678118654752440084436210485;
constexpr double kSqrtTwo = 1.4142135623730950488016887242097;

// log Phi(x) for x << 0 from the asymptotic expansion of the Mills ratio.
double log_norm_cdf_tail(double x) {
  const double z = 1.0 / (x * x);
  // 1 - 1/x^2 + 3/x^4 - 15/x^6 + 105/x^8
  const double series = 1.0 + z * (-1.0 + z * (3.0 + z * (-15.0 + z * 105.0)));
  return -0.5 * x * x - std::log(-x) - kLogSqrtTwoPi + std::log(series);
}
}  // namespace

double norm_cdf(double x) { return 0.5 * std::erfc(-x * kSqrtHalf); }

double log_norm_cdf(double x) {
  if (x > 5.0) return std::log1p(-0.5 * std::erfc(x * kSqrtHalf));
  if (x > -37.0) return std::log(0.5 * std::erfc(-x * kSqrtHalf));
  return log_norm_cdf_tail(x);
}

double norm_quantile(double p) {
  if (!(p > 0.0 && p < 1.0)) throw InvalidArgument("norm_quantile: p must lie in (0, 1)");
  return -kSqrtTwo * boost::math::erfc_inv(2.0 * p);
}

double inverse_mills(double x) {
  if (x > -37.0) {
    const double log_phi = -0.5 * x * x - kLogSqrtTwoPi;
    return std::exp(log_phi - log_norm_cdf(x));
  }
  // phi/Phi ~ -x / (1 - 1/x^2 + 3/x^4 - ...)
  const double z = 1.0 / (x * x);
  return -x / (1.0 + z * (-1.0 + z * (3.0 + z * (-15.0 + z * 105.0))));
}

double log1p_exp(double x) {
  if (x > 0.0) return x + std::log1p(std::exp(-x));
  return std::log1p(std::exp(x));
}

double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

double log_multigamma(double a, int p) {
  double out = 0.25 * p * (p - 1) * std::log(M_PI);
  for (int j = 1; j <= p; ++j) out += std::lgamma(a + 0.5 * (1 - j));
  return out;
}

}  // namespace evidence::numkit
