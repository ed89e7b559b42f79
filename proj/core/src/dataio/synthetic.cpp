#include "evidence/dataio/dataset.hpp"

#include "evidence/errors.hpp"
#include "evidence/numkit/rng.hpp"
#include "evidence/numkit/special.hpp"

#include <array>

namespace evidence::dataio {

namespace {

// Intercept first, then slopes; coefficients past the table are zero.
constexpr std::array<double, 14> kBernoulliCoefficients = {
    -0.25, 0.8, -0.6, 0.5, -0.4, 0.3, -0.25, 0.2, -0.15, 0.1, 0.0, 0.0, 0.0, 0.0};
constexpr std::array<double, 12> kLinregCoefficients = {
    1.0, 0.6, -0.4, 0.3, 0.25, -0.2, 0.15, 0.1, -0.05, 0.0, 0.0, 0.0};
constexpr double kLinregNoiseSd = 0.5;

template <std::size_t N>
Vector pad_coefficients(const std::array<double, N>& table, std::size_t p) {
  Vector b = Vector::Zero(static_cast<Eigen::Index>(p + 1));
  for (std::size_t i = 0; i <= p && i < N; ++i) b[static_cast<Eigen::Index>(i)] = table[i];
  return b;
}

Dataset covariate_frame(std::string name, std::size_t n, std::size_t p, numkit::RngStream& rng) {
  Dataset ds;
  ds.name = std::move(name);
  for (std::size_t j = 1; j <= p; ++j) ds.columns.push_back("x" + std::to_string(j));
  ds.columns.push_back("y");
  ds.values.resize(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(p + 1));
  for (Eigen::Index r = 0; r < ds.values.rows(); ++r) {
    for (Eigen::Index c = 0; c < static_cast<Eigen::Index>(p); ++c) ds.values(r, c) = rng.normal();
  }
  return ds;
}

}  // namespace

Vector bernoulli_true_coefficients(std::size_t p) { return pad_coefficients(kBernoulliCoefficients, p); }
Vector linreg_true_coefficients(std::size_t p) { return pad_coefficients(kLinregCoefficients, p); }

Dataset make_bernoulli_synthetic(std::size_t n, std::size_t p, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("make_bernoulli_synthetic: n must be at least 1");
  numkit::RngStream rng(seed, 0);
  Dataset ds = covariate_frame("bernoulli-synthetic", n, p, rng);
  const Vector beta = bernoulli_true_coefficients(p);
  const auto pe = static_cast<Eigen::Index>(p);
  for (Eigen::Index r = 0; r < ds.values.rows(); ++r) {
    const double eta = beta[0] + ds.values.row(r).head(pe).dot(beta.tail(pe));
    ds.values(r, pe) = rng.uniform() < numkit::norm_cdf(eta) ? 1.0 : 0.0;
  }
  ds.provenance = "synthetic probit data, n=" + std::to_string(n) + ", p=" + std::to_string(p) +
                  ", seed=" + std::to_string(seed);
  return ds;
}

Dataset make_linreg_synthetic(std::size_t n, std::size_t p, std::uint64_t seed) {
  if (n < 1) throw InvalidArgument("make_linreg_synthetic: n must be at least 1");
  numkit::RngStream rng(seed, 0);
  Dataset ds = covariate_frame("linreg-synthetic", n, p, rng);
  const Vector beta = linreg_true_coefficients(p);
  const auto pe = static_cast<Eigen::Index>(p);
  for (Eigen::Index r = 0; r < ds.values.rows(); ++r) {
    ds.values(r, pe) = beta[0] + ds.values.row(r).head(pe).dot(beta.tail(pe)) + kLinregNoiseSd * rng.normal();
  }
  ds.provenance = "synthetic Gaussian regression data, n=" + std::to_string(n) + ", p=" +
                  std::to_string(p) + ", seed=" + std::to_string(seed);
  return ds;
}

}  // namespace evidence::dataio
