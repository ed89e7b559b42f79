#include "evidence/errors.hpp"
#include "evidence/numkit/distributions.hpp"
#include "evidence/numkit/linalg.hpp"
#include "evidence/numkit/parallel.hpp"
#include "evidence/numkit/rng.hpp"
#include "evidence/numkit/special.hpp"
#include "evidence/numkit/stats.hpp"

#include <gtest/gtest.h>

#include <Eigen/Eigenvalues>

#include <atomic>
#include <cmath>
#include <numbers>
#include <vector>

using namespace evidence;
using namespace evidence::numkit;

namespace {

Matrix random_spd(int n, RngStream& rng) {
  Matrix a(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) a(i, j) = rng.normal();
  return a * a.transpose() + 0.5 * Matrix::Identity(n, n);
}

}  // namespace

TEST(Linalg, LogDetMatchesEigenvalues) {
  RngStream rng(7, 0);
  for (int rep = 0; rep < 10; ++rep) {
    const Matrix a = random_spd(5, rng);
    const auto c = chol_logdet(a);
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(a);
    const double oracle = eig.eigenvalues().array().log().sum();
    EXPECT_NEAR(c.log_det, oracle, 1e-10 * std::abs(oracle));
    EXPECT_LT((c.lower * c.lower.transpose() - a).cwiseAbs().maxCoeff(), 1e-10);
  }
}

TEST(Linalg, SolveAndInverse) {
  RngStream rng(8, 0);
  const Matrix a = random_spd(6, rng);
  const auto c = chol_logdet(a);
  Vector b(6);
  for (int i = 0; i < 6; ++i) b[i] = rng.normal();
  EXPECT_LT((a * c.solve(b) - b).norm(), 1e-10);
  EXPECT_LT((a * c.inverse() - Matrix::Identity(6, 6)).cwiseAbs().maxCoeff(), 1e-10);
  // L^{-T} z has covariance A^{-1}: check L^T (L^{-T} z) = z
  EXPECT_LT((c.lower.transpose() * c.solve_upper(b) - b).norm(), 1e-10);
}

TEST(Linalg, NotPositiveDefiniteNamesMinor) {
  Matrix a = Matrix::Identity(4, 4);
  a(2, 2) = -1.0;
  try {
    chol_logdet(a, "unit");
    FAIL() << "expected NotPositiveDefinite";
  } catch (const NotPositiveDefinite& e) {
    EXPECT_EQ(e.minor(), 3u);
    EXPECT_NE(std::string(e.what()).find("unit"), std::string::npos);
  }
}

TEST(Distributions, NormalDensity) {
  EXPECT_NEAR(log_density(Normal{0.0, 1.0}, 2.0), -0.5 * std::log(2 * std::numbers::pi) - 2.0, 1e-14);
  EXPECT_NEAR(log_density(Normal{1.0, 0.1}, 1.0), -0.5 * std::log(2 * std::numbers::pi * 0.01), 1e-14);
}

TEST(Distributions, MvNormalAgreesWithProductOfUnivariates) {
  MvNormal d{Vector::Zero(3), Matrix::Identity(3, 3) * 4.0};
  Vector x(3);
  x << 1.0, -2.0, 0.5;
  double sum = 0.0;
  for (int i = 0; i < 3; ++i) sum += log_density(Normal{0.0, 2.0}, x[i]);
  EXPECT_NEAR(log_density(d, x), sum, 1e-12);
}

TEST(Distributions, WishartAtIdentity) {
  // df 4, p 2, S = I, X = I: ((4-3)/2) log|I| - tr(I)/2 - 4 log 2 - log Gamma_2(2),
  // Gamma_2(2) = sqrt(pi) Gamma(2) Gamma(3/2) = pi / 2.
  const double hand = -1.0 - 4.0 * std::log(2.0) - std::log(std::numbers::pi / 2.0);
  EXPECT_NEAR(log_density(Wishart{4.0, Matrix::Identity(2, 2)}, Matrix::Identity(2, 2)), hand, 1e-12);
}

TEST(Distributions, GammaBernoulliPoisson) {
  EXPECT_NEAR(log_density(Gamma{2.0, 3.0}, 0.5), 2.0 * std::log(3.0) + std::log(0.5) - 1.5, 1e-13);
  EXPECT_NEAR(log_density(Bernoulli{0.3}, 1.0), std::log(0.3), 1e-15);
  EXPECT_NEAR(log_density(Poisson{2.0}, 3.0), 3.0 * std::log(2.0) - 2.0 - std::log(6.0), 1e-13);
  EXPECT_THROW(log_density(Normal{0.0, -1.0}, 0.0), InvalidArgument);
}

TEST(Distributions, GammaSampleMean) {
  RngStream rng(11, 0);
  const int n = 1000000;
  std::vector<double> x(n);
  for (auto& v : x) v = sample(Gamma{2.0, 3.0}, rng);
  const double se = std::sqrt(2.0 / 9.0 / n);
  EXPECT_NEAR(mean(x), 2.0 / 3.0, 3.0 * se);
}

TEST(Distributions, TruncatedNormalMean) {
  RngStream rng(12, 0);
  const int n = 200000;
  std::vector<double> x(n);
  for (auto& v : x) v = sample(TruncatedNormal{0.0, 1.0, 0.0}, rng);
  const double m = std::sqrt(2.0 / std::numbers::pi);
  const double se = std::sqrt((1.0 - m * m) / n);
  EXPECT_NEAR(mean(x), m, 3.0 * se);
  for (double v : x) ASSERT_GT(v, 0.0);
}

TEST(Distributions, FarTailTruncation) {
  RngStream rng(13, 0);
  for (int i = 0; i < 1000; ++i) EXPECT_GT(sample_std_normal_above(12.0, rng), 12.0);
}

TEST(Distributions, WishartSampleMean) {
  RngStream rng(14, 0);
  Matrix s(2, 2);
  s << 1.0, 0.3, 0.3, 0.5;
  Matrix acc = Matrix::Zero(2, 2);
  const int n = 20000;
  for (int i = 0; i < n; ++i) acc += sample(Wishart{5.0, s}, rng);
  acc /= n;
  EXPECT_LT((acc - 5.0 * s).cwiseAbs().maxCoeff(), 0.1);
}

TEST(Special, LogSumExpShiftInvariant) {
  RngStream rng(15, 0);
  std::vector<double> v(100);
  for (auto& x : v) x = 50.0 * rng.normal();
  const double a = log_sum_exp(v);
  double mx = v[0];
  for (double x : v) mx = std::max(mx, x);
  std::vector<double> shifted(v);
  for (auto& x : shifted) x -= mx;
  EXPECT_NEAR(a, log_sum_exp(shifted) + mx, 1e-12);
  EXPECT_THROW(log_sum_exp(std::vector<double>{}), InvalidArgument);
  EXPECT_NEAR(log_mean_exp(std::vector<double>{0.0, 0.0}), 0.0, 1e-15);
}

TEST(Special, NormalCdfTails) {
  EXPECT_NEAR(norm_cdf(0.0), 0.5, 1e-16);
  EXPECT_NEAR(norm_cdf(-1.959963984540054), 0.025, 1e-15);
  EXPECT_NEAR(norm_quantile(0.975), 1.959963984540054, 1e-12);
  // asymptotic log Phi(x) ~ -x^2/2 - log(-x) - log sqrt(2 pi)
  const double x = -60.0;
  EXPECT_NEAR(log_norm_cdf(x), -0.5 * x * x - std::log(-x) - kLogSqrtTwoPi - 1.0 / (x * x), 1e-6);
  EXPECT_TRUE(std::isfinite(log_norm_cdf(-1e4)));
  EXPECT_NEAR(log1p_exp(800.0), 800.0, 1e-12);
  EXPECT_NEAR(log1p_exp(-800.0), 0.0, 1e-300);
  EXPECT_NEAR(log_multigamma(2.0, 2), std::log(std::numbers::pi / 2.0), 1e-13);
}

TEST(Stats, BatchMeans) {
  std::vector<double> v{1, 2, 3, 4, 5, 6, 7};
  const auto b = batch_means(v, 3);
  ASSERT_EQ(b.size(), 3u);
  EXPECT_DOUBLE_EQ(b[0], 1.5);
  EXPECT_DOUBLE_EQ(b[2], 5.5);
  EXPECT_DOUBLE_EQ(variance(std::vector<double>{1, 2, 3}), 1.0);
  // iid draws: batch SE close to sd / sqrt(n)
  RngStream rng(16, 0);
  std::vector<double> x(100000);
  for (auto& e : x) e = rng.normal();
  EXPECT_NEAR(batch_means_se(x, 50), 1.0 / std::sqrt(1e5), 0.0015);
}

TEST(Rng, ReproducibleAndStreamsDiffer) {
  RngStream a(42, 3), b(42, 3), c(42, 4);
  bool differs = false;
  for (int i = 0; i < 100; ++i) {
    const auto x = a(), y = b(), z = c();
    EXPECT_EQ(x, y);
    differs = differs || (x != z);
  }
  EXPECT_TRUE(differs);
  RngStream s1 = a.substream(1), s2 = a.substream(2), s1b = a.substream(1);
  EXPECT_EQ(s1(), s1b());
  EXPECT_NE(s1(), s2());
}

TEST(Rng, UniformOpenInterval) {
  RngStream rng(1, 0);
  double lo = 1.0, hi = 0.0, sum = 0.0;
  for (int i = 0; i < 100000; ++i) {
    const double u = rng.uniform();
    lo = std::min(lo, u);
    hi = std::max(hi, u);
    sum += u;
  }
  EXPECT_GT(lo, 0.0);
  EXPECT_LT(hi, 1.0);
  EXPECT_NEAR(sum / 1e5, 0.5, 0.003);
}

TEST(Parallel, CoversEveryIndexOnce) {
  std::vector<std::atomic<int>> hits(1000);
  parallel_for(1000, 4, [&](std::size_t i) { hits[i]++; });
  for (auto& h : hits) EXPECT_EQ(h.load(), 1);
  EXPECT_THROW(parallel_for(10, 2, [](std::size_t i) {
                 if (i == 7) throw InvalidArgument("boom");
               }),
               InvalidArgument);
}
