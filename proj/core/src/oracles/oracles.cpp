#include "evidence/oracles/oracles.hpp"

#include "evidence/errors.hpp"
#include "evidence/numkit/special.hpp"

#include <boost/math/tools/minima.hpp>

#include <Eigen/Eigenvalues>

#include <cmath>
#include <numbers>

namespace evidence::oracles {

namespace {

using numkit::kLogTwoPi;

// Running log-sum-exp.
struct LogAccumulator {
  double max = -std::numeric_limits<double>::infinity();
  double sum = 0.0;
  void add(double v) {
    if (v == -std::numeric_limits<double>::infinity()) return;
    if (v <= max) {
      sum += std::exp(v - max);
    } else {
      sum = sum * std::exp(max - v) + 1.0;
      max = v;
    }
  }
  double value() const { return max + std::log(sum); }
};

}  // namespace

OracleResult toy_exact(double y, double sigma0, double sigma1) {
  if (!(sigma0 >= 0.0) || !(sigma1 > 0.0)) throw InvalidArgument("toy_exact: need sigma0 >= 0, sigma1 > 0");
  const double v = sigma0 * sigma0 + sigma1 * sigma1;
  return {-0.5 * (kLogTwoPi + std::log(v) + y * y / v), "closed-form", 1e-14};
}

OracleResult gausslinreg_exact_fixed_sigma(const Matrix& X, const Vector& y, double prior_mean, double prior_var,
                                           double sigma2) {
  if (X.rows() != y.size()) throw InvalidArgument("gausslinreg_exact_fixed_sigma: X rows differ from y length");
  if (!(sigma2 > 0.0) || !(prior_var >= 0.0)) throw InvalidArgument("gausslinreg_exact_fixed_sigma: bad variances");
  const auto n = y.size();
  const Matrix cov = sigma2 * Matrix::Identity(n, n) + prior_var * X * X.transpose();
  const auto c = numkit::chol_logdet(cov, "marginal covariance");
  const Vector r = y - X * Vector::Constant(X.cols(), prior_mean);
  const Vector w = c.lower.triangularView<Eigen::Lower>().solve(r);
  return {-0.5 * (static_cast<double>(n) * kLogTwoPi + c.log_det + w.squaredNorm()), "closed-form", 1e-10};
}

void gauss_legendre(int n, Vector& nodes, Vector& weights) {
  if (n < 1) throw InvalidArgument("gauss_legendre: n must be positive");
  nodes.resize(n);
  weights.resize(n);
  const int half = (n + 1) / 2;
  for (int i = 0; i < half; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0, p1 = 0.0;
      for (int k = 1; k <= n; ++k) {
        const double p2 = p1;
        p1 = p0;
        p0 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p2) / k;
      }
      dp = n * (x * p0 - p1) / (x * x - 1.0);
      const double dx = p0 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-15) break;
    }
    nodes[i] = -x;
    nodes[n - 1 - i] = x;
    weights[i] = weights[n - 1 - i] = 2.0 / ((1.0 - x * x) * dp * dp);
  }
}

OracleResult gausslinreg_quadrature(const modelzoo::GaussLinReg& m, int n_nodes, double tolerance) {
  if (n_nodes < 64) throw InvalidArgument("gausslinreg_quadrature: need at least 64 nodes");
  modelzoo::validate(m);
  const auto n = m.y.size();
  const Eigen::SelfAdjointEigenSolver<Matrix> eig(m.X * m.X.transpose());
  const Vector lambda = eig.eigenvalues().cwiseMax(0.0);
  const Vector r = eig.eigenvectors().transpose() * (m.y - m.X * Vector::Constant(m.X.cols(), m.prior_mean));
  const double a = m.gamma_shape, b = m.gamma_rate;

  // log N(y | theta) + log prior of theta = log tau (with Jacobian).
  const auto f = [&](double theta) {
    const double inv_tau = std::exp(-theta);
    double s = -0.5 * static_cast<double>(n) * kLogTwoPi;
    for (Eigen::Index i = 0; i < n; ++i) {
      const double v = inv_tau + m.prior_var * lambda[i];
      s -= 0.5 * (std::log(v) + r[i] * r[i] / v);
    }
    return s + a * std::log(b) - std::lgamma(a) + a * theta - b * std::exp(theta);
  };

  // Mode and curvature set the integration window.
  const double centre = std::log(a / b);
  const auto best = boost::math::tools::brent_find_minima([&](double t) { return -f(t); }, centre - 40.0,
                                                          centre + 40.0, 60);
  const double mode = best.first, fmax = -best.second;
  const double h = 1e-3;
  const double curv = -(f(mode + h) - 2.0 * fmax + f(mode - h)) / (h * h);
  const double sd = curv > 0.0 ? 1.0 / std::sqrt(curv) : 1.0;
  double lo = mode - 10.0 * sd, hi = mode + 10.0 * sd;
  while (fmax - f(lo) < 60.0) lo -= 5.0 * sd;
  while (fmax - f(hi) < 60.0) hi += 5.0 * sd;

  const auto integrate = [&](int nodes) {
    Vector x, w;
    gauss_legendre(nodes, x, w);
    LogAccumulator acc;
    const double half = 0.5 * (hi - lo), mid = 0.5 * (hi + lo);
    for (int i = 0; i < nodes; ++i) acc.add(std::log(w[i] * half) + f(mid + half * x[i]));
    return acc.value();
  };
  const double coarse = integrate(n_nodes);
  const double fine = integrate(2 * n_nodes);
  const double bound = std::abs(fine - coarse);
  if (bound > tolerance) {
    throw ConvergenceFailure("gausslinreg_quadrature: node doubling changed the result by " + std::to_string(bound));
  }
  return {fine, "quadrature", bound};
}

OracleResult glm_quadrature(const modelzoo::BinaryRegression& m, bool probit, int nodes_per_axis, double tolerance) {
  const auto d = m.X.cols();
  if (d < 1 || d > 3) throw InvalidArgument("glm_quadrature: supports 1 to 3 coefficients");
  if (nodes_per_axis < 8) throw InvalidArgument("glm_quadrature: too few nodes");
  if (m.X.rows() != m.y.size()) throw InvalidArgument("glm_quadrature: X rows differ from y length");
  if (!(m.prior_var > 0.0)) throw InvalidArgument("glm_quadrature: prior variance must be positive");
  const auto n = m.y.size();
  if (n == 0) return {0.0, "quadrature", 0.0};
  const double sd = std::sqrt(m.prior_var);
  const double lo = m.prior_mean - 10.0 * sd, hi = m.prior_mean + 10.0 * sd;

  const auto log_lik = [&](const Vector& lin) {
    double s = 0.0;
    for (Eigen::Index t = 0; t < n; ++t) {
      const double sign = m.y[t] > 0.5 ? 1.0 : -1.0;
      const double p = probit ? 0.5 * std::erfc(-sign * lin[t] / std::numbers::sqrt2)
                              : 1.0 / (1.0 + std::exp(-sign * lin[t]));
      s += std::log(std::max(p, 1e-300));
    }
    return s;
  };

  const auto integrate = [&](int nodes) {
    const double step = (hi - lo) / (nodes - 1);
    Vector grid(nodes), logw(nodes);
    for (int i = 0; i < nodes; ++i) {
      grid[i] = lo + step * i;
      const double z = (grid[i] - m.prior_mean) / sd;
      // trapezoid weight times the prior density
      logw[i] = std::log((i == 0 || i == nodes - 1) ? 0.5 * step : step) - 0.5 * (kLogTwoPi + z * z) - std::log(sd);
    }
    // per-axis contributions to the linear predictor
    std::vector<Matrix> cols;
    for (Eigen::Index k = 0; k < d; ++k) cols.emplace_back(m.X.col(k) * grid.transpose());
    long total = 1;
    for (Eigen::Index k = 0; k < d; ++k) total *= nodes;
    LogAccumulator acc;
    Vector lin(n);
    for (long flat = 0; flat < total; ++flat) {
      long rest = flat;
      double lw = 0.0;
      lin.setZero();
      for (Eigen::Index k = 0; k < d; ++k) {
        const auto i = static_cast<Eigen::Index>(rest % nodes);
        rest /= nodes;
        lw += logw[i];
        lin += cols[static_cast<std::size_t>(k)].col(i);
      }
      acc.add(lw + log_lik(lin));
    }
    return acc.value();
  };
  const double fine = integrate(nodes_per_axis);
  const double coarse = integrate(nodes_per_axis / 2);
  const double bound = std::abs(fine - coarse);
  if (bound > tolerance) {
    throw ConvergenceFailure("glm_quadrature: node doubling changed the result by " + std::to_string(bound));
  }
  return {fine, "quadrature", bound};
}

OracleResult glm_quadrature(const modelzoo::ProbitReg& m, int nodes_per_axis) {
  return glm_quadrature(m, true, nodes_per_axis);
}

OracleResult glm_quadrature(const modelzoo::LogitReg& m, int nodes_per_axis) {
  return glm_quadrature(m, false, nodes_per_axis);
}

}  // namespace evidence::oracles
