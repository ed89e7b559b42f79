#include "evidence/errors.hpp"
#include "evidence/numkit/distributions.hpp"
#include "evidence/numkit/rng.hpp"
#include "evidence/oracles/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace evidence;
using namespace evidence::modelzoo;
using numkit::RngStream;

namespace {

GaussLinReg linreg(int n, int p, std::uint64_t seed) {
  RngStream rng(seed, 0);
  GaussLinReg m;
  m.X.resize(n, p);
  m.y.resize(n);
  for (int i = 0; i < n; ++i) {
    m.X(i, 0) = 1.0;
    for (int j = 1; j < p; ++j) m.X(i, j) = rng.normal();
    m.y[i] = 1.0 + 0.5 * m.X.row(i).sum() + 0.6 * rng.normal();
  }
  m.prior_var = 10.0;
  m.gamma_shape = 2.0;
  m.gamma_rate = 1.0;
  return m;
}

}  // namespace

TEST(Oracles, ToyExactTableValues) {
  EXPECT_NEAR(oracles::toy_exact(2.0, 1000.0, 1.0).log_ml, -7.8267, 5e-5);
  EXPECT_NEAR(oracles::toy_exact(2.0, 10.0, 1.0).log_ml, -3.2463, 5e-5);
  EXPECT_NEAR(oracles::toy_exact(2.0, 0.1, 1.0).log_ml, -2.9041, 5e-5);
  EXPECT_NEAR(oracles::toy_exact(-2.0, 0.1, 1.0).log_ml, -2.9041, 5e-5);
  EXPECT_THROW(oracles::toy_exact(2.0, 1.0, 0.0), InvalidArgument);
}

TEST(Oracles, FixedSigmaMatchesMvNormal) {
  const GaussLinReg m = linreg(15, 3, 1);
  const double s2 = 0.4;
  const Matrix cov = s2 * Matrix::Identity(15, 15) + m.prior_var * m.X * m.X.transpose();
  const double direct = numkit::log_density(numkit::MvNormal{m.X * Vector::Constant(3, m.prior_mean), cov}, m.y);
  EXPECT_NEAR(oracles::gausslinreg_exact_fixed_sigma(m.X, m.y, m.prior_mean, m.prior_var, s2).log_ml, direct, 1e-10);
}

TEST(Oracles, GaussLegendreExactForPolynomials) {
  Vector x, w;
  oracles::gauss_legendre(10, x, w);
  EXPECT_NEAR(w.sum(), 2.0, 1e-14);
  // degree 18 integrates exactly: int_{-1}^{1} x^18 = 2/19
  double s = 0.0;
  for (int i = 0; i < 10; ++i) s += w[i] * std::pow(x[i], 18);
  EXPECT_NEAR(s, 2.0 / 19.0, 1e-14);
  EXPECT_THROW(oracles::gauss_legendre(0, x, w), InvalidArgument);
}

TEST(Oracles, LinregQuadratureSelfConvergence) {
  const GaussLinReg m = linreg(30, 3, 2);
  const auto a = oracles::gausslinreg_quadrature(m, 128);
  const auto b = oracles::gausslinreg_quadrature(m, 256);
  EXPECT_LT(std::abs(a.log_ml - b.log_ml), 1e-8);
  EXPECT_LT(a.error_bound, 1e-8);
}

TEST(Oracles, LinregQuadraturePointMassLimit) {
  // a Gamma prior concentrated at tau = 2 reduces to the fixed-sigma closed form
  GaussLinReg m = linreg(25, 3, 3);
  m.gamma_shape = 1e8;
  m.gamma_rate = 5e7;
  const double exact = oracles::gausslinreg_exact_fixed_sigma(m.X, m.y, m.prior_mean, m.prior_var, 0.5).log_ml;
  EXPECT_NEAR(oracles::gausslinreg_quadrature(m).log_ml, exact, 1e-5);
}

TEST(Oracles, GlmQuadratureStableUnderDoubling) {
  RngStream rng(4, 0);
  ProbitReg m;
  m.X.resize(50, 1);
  m.y.resize(50);
  for (int i = 0; i < 50; ++i) {
    m.X(i, 0) = rng.normal();
    m.y[i] = rng.uniform() < 0.5 + 0.3 * std::tanh(m.X(i, 0)) ? 1.0 : 0.0;
  }
  m.prior_var = 4.0;
  const auto r = oracles::glm_quadrature(m, 2048);
  EXPECT_LT(r.error_bound, 1e-5);
  EXPECT_LT(std::abs(r.log_ml - oracles::glm_quadrature(m, 4096).log_ml), 1e-5);
}

TEST(Oracles, GlmQuadratureEmptyDataAndSingleObservation) {
  LogitReg m;
  m.X.resize(0, 1);
  m.y.resize(0);
  EXPECT_EQ(oracles::glm_quadrature(m).log_ml, 0.0);
  // one observation with x = 1 and a N(0, 1) prior: P(y = 1) = 1/2 by symmetry
  m.X = Matrix::Ones(1, 1);
  m.y = Vector::Ones(1);
  EXPECT_NEAR(oracles::glm_quadrature(m).log_ml, std::log(0.5), 1e-8);
  ProbitReg p;
  p.X = Matrix::Ones(1, 1);
  p.y = Vector::Ones(1);
  p.prior_mean = 0.5;
  p.prior_var = 3.0;
  // P(z > 0) with z ~ N(0.5, 1 + 3)
  EXPECT_NEAR(oracles::glm_quadrature(p).log_ml, std::log(0.5 * std::erfc(-0.25 / std::sqrt(2.0))), 1e-8);
}
