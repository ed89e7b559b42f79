#include "evidence/numkit/distributions.hpp"

#include "evidence/errors.hpp"
#include "evidence/numkit/special.hpp"

#include <cmath>
#include <random>

namespace evidence::numkit {

namespace {
void require(bool ok, const char* what) {
  if (!ok) throw InvalidArgument(what);
}
}  // namespace

double log_density(const Normal& d, double x) {
  require(d.sd > 0.0 && std::isfinite(d.sd), "Normal: sd must be positive");
  const double z = (x - d.mean) / d.sd;
  return -kLogSqrtTwoPi - std::log(d.sd) - 0.5 * z * z;
}

double log_density(const MvNormal& d, const Vector& x) {
  require(d.mean.size() == x.size() && d.cov.rows() == x.size() && d.cov.cols() == x.size(),
          "MvNormal: dimension mismatch");
  const CholeskyFactor c = chol_logdet(d.cov, "MvNormal covariance");
  const Vector z = c.lower.triangularView<Eigen::Lower>().solve(x - d.mean);
  return -0.5 * (static_cast<double>(x.size()) * kLogTwoPi + c.log_det + z.squaredNorm());
}

double log_density(const Gamma& d, double x) {
  require(d.shape > 0.0 && d.rate > 0.0, "Gamma: shape and rate must be positive");
  if (!(x > 0.0)) return -std::numeric_limits<double>::infinity();
  return d.shape * std::log(d.rate) - std::lgamma(d.shape) + (d.shape - 1.0) * std::log(x) -
         d.rate * x;
}

double log_density(const Wishart& d, const Matrix& x) {
  const Eigen::Index p = d.scale.rows();
  require(d.scale.cols() == p && x.rows() == p && x.cols() == p, "Wishart: dimension mismatch");
  require(d.df > static_cast<double>(p) - 1.0, "Wishart: df must exceed dim - 1");
  const CholeskyFactor s = chol_logdet(d.scale, "Wishart scale");
  const CholeskyFactor w = chol_logdet(x, "Wishart argument");
  const double trace = s.solve(x).trace();
  const double pd = static_cast<double>(p);
  return 0.5 * (d.df - pd - 1.0) * w.log_det - 0.5 * trace - 0.5 * d.df * pd * std::log(2.0) -
         0.5 * d.df * s.log_det - log_multigamma(0.5 * d.df, static_cast<int>(p));
}

double log_density(const Bernoulli& d, double x) {
  require(d.p >= 0.0 && d.p <= 1.0, "Bernoulli: p must lie in [0, 1]");
  require(x == 0.0 || x == 1.0, "Bernoulli: outcome must be 0 or 1");
  return x == 1.0 ? std::log(d.p) : std::log1p(-d.p);
}

double log_density(const Poisson& d, double x) {
  require(d.rate > 0.0, "Poisson: rate must be positive");
  require(x >= 0.0 && x == std::floor(x), "Poisson: outcome must be a non-negative integer");
  return x * std::log(d.rate) - d.rate - std::lgamma(x + 1.0);
}

double log_density(const Distribution& d, const Point& x) {
  return std::visit(
      [&](const auto& dist) -> double {
        using D = std::decay_t<decltype(dist)>;
        if constexpr (std::is_same_v<D, MvNormal>) {
          require(std::holds_alternative<Vector>(x), "log_density: MvNormal needs a vector point");
          return log_density(dist, std::get<Vector>(x));
        } else if constexpr (std::is_same_v<D, Wishart>) {
          require(std::holds_alternative<Matrix>(x), "log_density: Wishart needs a matrix point");
          return log_density(dist, std::get<Matrix>(x));
        } else {
          require(std::holds_alternative<double>(x), "log_density: scalar law needs a scalar point");
          return log_density(dist, std::get<double>(x));
        }
      },
      d);
}

double sample(const Normal& d, RngStream& rng) {
  require(d.sd >= 0.0 && std::isfinite(d.sd), "Normal: sd must be non-negative");
  if (d.sd == 0.0) return d.mean;
  return d.mean + d.sd * rng.normal();
}

Vector sample(const MvNormal& d, RngStream& rng) {
  const CholeskyFactor c = chol_logdet(d.cov, "MvNormal covariance");
  Vector z(d.mean.size());
  for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
  return d.mean + c.lower * z;
}

double sample(const Gamma& d, RngStream& rng) { return rng.gamma(d.shape, d.rate); }

Matrix sample_wishart_chol(double df, const Matrix& scale_lower, RngStream& rng) {
  const Eigen::Index p = scale_lower.rows();
  Matrix a = Matrix::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    // chi^2 with df - i degrees of freedom is Gamma((df - i) / 2, rate 1/2)
    a(i, i) = std::sqrt(rng.gamma(0.5 * (df - static_cast<double>(i)), 0.5));
    for (Eigen::Index j = 0; j < i; ++j) a(i, j) = rng.normal();
  }
  const Matrix la = scale_lower * a;
  return la * la.transpose();
}

Matrix sample(const Wishart& d, RngStream& rng) {
  require(d.df > static_cast<double>(d.scale.rows()) - 1.0, "Wishart: df must exceed dim - 1");
  return sample_wishart_chol(d.df, chol_logdet(d.scale, "Wishart scale").lower, rng);
}

double sample(const Bernoulli& d, RngStream& rng) {
  require(d.p >= 0.0 && d.p <= 1.0, "Bernoulli: p must lie in [0, 1]");
  return rng.uniform() < d.p ? 1.0 : 0.0;
}

double sample(const Poisson& d, RngStream& rng) {
  require(d.rate > 0.0, "Poisson: rate must be positive");
  std::poisson_distribution<long> dist(d.rate);
  return static_cast<double>(dist(rng));
}

double sample_std_normal_above(double a, RngStream& rng) {
  if (a <= 0.0) {
    for (;;) {
      const double z = rng.normal();
      if (z > a) return z;
    }
  }
  const double lambda = 0.5 * (a + std::sqrt(a * a + 4.0));
  for (;;) {
    const double z = a - std::log(rng.uniform()) / lambda;
    const double diff = z - lambda;
    if (std::log(rng.uniform()) <= -0.5 * diff * diff) return z;
  }
}

double sample(const TruncatedNormal& d, RngStream& rng) {
  require(d.sd > 0.0, "TruncatedNormal: sd must be positive");
  require(d.lower < d.upper, "TruncatedNormal: empty support");
  const double a = (d.lower - d.mean) / d.sd;
  const double b = (d.upper - d.mean) / d.sd;
  if (std::isinf(b)) return d.mean + d.sd * sample_std_normal_above(a, rng);
  if (std::isinf(a)) return d.mean - d.sd * sample_std_normal_above(-b, rng);
  // Two finite bounds: inverse CDF on the side away from the far tail.
  if (a > 0.0) {
    const double fa = norm_cdf(-a), fb = norm_cdf(-b);
    return d.mean - d.sd * norm_quantile(fb + rng.uniform() * (fa - fb));
  }
  const double fa = norm_cdf(a), fb = norm_cdf(b);
  return d.mean + d.sd * norm_quantile(fa + rng.uniform() * (fb - fa));
}

}  // namespace evidence::numkit
