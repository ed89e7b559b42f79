#include "evidence/dataio/dataset.hpp"
#include "evidence/errors.hpp"
#include "evidence/modelzoo/kernels.hpp"
#include "evidence/modelzoo/latent_view.hpp"
#include "evidence/modelzoo/tempered.hpp"
#include "evidence/numkit/special.hpp"
#include "evidence/numkit/stats.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

using namespace evidence;
using namespace evidence::modelzoo;
using numkit::RngStream;

namespace {

const std::filesystem::path kData = EVIDENCE_TEST_DATA_DIR;

Matrix gaussian_design(int n, int p, RngStream& rng, bool intercept = true) {
  Matrix x(n, p);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < p; ++j) x(i, j) = (intercept && j == 0) ? 1.0 : rng.normal();
  return x;
}

GaussLinReg small_linreg(int n, int p, std::uint64_t seed) {
  RngStream rng(seed, 0);
  GaussLinReg m;
  m.X = gaussian_design(n, p, rng);
  Vector beta(p);
  for (int j = 0; j < p; ++j) beta[j] = 0.5 * (j + 1);
  m.y = m.X * beta;
  for (int i = 0; i < n; ++i) m.y[i] += 0.7 * rng.normal();
  m.prior_var = 4.0;
  return m;
}

BinaryRegression small_binary(int n, std::uint64_t seed, bool probit, double b = 0.8) {
  RngStream rng(seed, 0);
  BinaryRegression m;
  m.X = gaussian_design(n, 1, rng, false);
  m.y.resize(n);
  for (int i = 0; i < n; ++i) {
    const double p = probit ? numkit::norm_cdf(b * m.X(i, 0)) : numkit::logistic(b * m.X(i, 0));
    m.y[i] = rng.uniform() < p ? 1.0 : 0.0;
  }
  m.prior_var = 4.0;
  return m;
}

// E[beta | y] for a one-coefficient binary regression by trapezoid quadrature.
double quadrature_posterior_mean(const BinaryRegression& m, bool probit) {
  const double sd = std::sqrt(m.prior_var);
  const int n = 4001;
  std::vector<double> grid(n), lw(n);
  for (int i = 0; i < n; ++i) {
    grid[i] = m.prior_mean - 8 * sd + 16 * sd * i / (n - 1);
    double s = -0.5 * std::pow((grid[i] - m.prior_mean) / sd, 2);
    for (Eigen::Index t = 0; t < m.y.size(); ++t) {
      const double lin = (m.y[t] > 0.5 ? 1.0 : -1.0) * grid[i] * m.X(t, 0);
      s += probit ? numkit::log_norm_cdf(lin) : -numkit::log1p_exp(-lin);
    }
    lw[i] = s;
  }
  const double mx = *std::max_element(lw.begin(), lw.end());
  double z = 0, zb = 0;
  for (int i = 0; i < n; ++i) {
    const double w = std::exp(lw[i] - mx) * ((i == 0 || i == n - 1) ? 0.5 : 1.0);
    z += w;
    zb += w * grid[i];
  }
  return zb / z;
}

// Central differences of the log joint against the analytic derivatives.
void check_derivs(const LatentGaussianView& view, const Vector& theta, const Vector& eta) {
  const JointDerivs d = log_joint_derivs(view, theta, eta);
  const Vector psi = join_psi(eta, theta);
  const auto f = [&](const Vector& p) { return log_joint(view, psi_theta(view, p), psi_latent(view, p)); };
  EXPECT_NEAR(d.value, f(psi), 1e-9 * std::max(1.0, std::abs(d.value)));
  const auto k = psi.size();
  const double h = 1e-5;
  Vector fd_grad(k);
  Matrix fd_hess(k, k);
  const auto grad_at = [&](const Vector& p) { return log_joint_derivs(view, psi_theta(view, p), psi_latent(view, p)).gradient; };
  for (Eigen::Index i = 0; i < k; ++i) {
    Vector up = psi, dn = psi;
    up[i] += h;
    dn[i] -= h;
    fd_grad[i] = (f(up) - f(dn)) / (2 * h);
    fd_hess.col(i) = (grad_at(up) - grad_at(dn)) / (2 * h);
  }
  const double gscale = std::max(1.0, d.gradient.cwiseAbs().maxCoeff());
  const double hscale = std::max(1.0, d.hessian.cwiseAbs().maxCoeff());
  EXPECT_LT((fd_grad - d.gradient).cwiseAbs().maxCoeff() / gscale, 1e-5);
  EXPECT_LT((fd_hess - d.hessian).cwiseAbs().maxCoeff() / hscale, 1e-5);
  EXPECT_LT((d.hessian - d.hessian.transpose()).cwiseAbs().maxCoeff(), 1e-9 * hscale);
}

PoissonGLMM epilepsy_glmm() { return make_epilepsy_glmm(dataio::load_epilepsy(kData / "epilepsy.csv")); }

}  // namespace

TEST(LogJoint, ToyHandEvaluation) {
  // log N(2; 0, 1) + log N(0; 0, 0.01) = -2.918939 + 1.383647
  Vector eta(1);
  eta << 0.0;
  const double v = log_joint(ModelSpec(ToyGaussian{2.0, 0.1, 1.0}), Vector(0), eta);
  EXPECT_NEAR(v, -1.5353, 5e-5);
  EXPECT_NEAR(v, -0.5 * std::log(2 * std::numbers::pi) - 2.0 - 0.5 * std::log(2 * std::numbers::pi * 0.01), 1e-12);
}

TEST(LogJoint, Dimensions) {
  const auto ds = dataio::make_linreg_synthetic(47, 8, 1);
  std::vector<std::string> cov;
  for (int i = 1; i <= 8; ++i) cov.push_back("x" + std::to_string(i));
  const auto glr = latent_gaussian_view(make_gausslinreg(ds, "y", cov, 0.0, 1.0, 1.0, 1.0));
  EXPECT_EQ(glr.latent_dim(), 9u);
  EXPECT_EQ(glr.theta_dim(), 1u);
  const auto glmm = latent_gaussian_view(epilepsy_glmm());
  EXPECT_EQ(glmm.latent_dim(), 120u);
  EXPECT_EQ(glmm.theta_dim(), 3u);
  EXPECT_EQ(glmm.n_obs(), 290u);
  EXPECT_THROW(log_joint(glr, Vector::Zero(2), Vector::Zero(9)), InvalidArgument);
}

TEST(LogJoint, ValidationRejectsBadSpecs) {
  EXPECT_THROW(validate(ModelSpec(ToyGaussian{1.0, 1.0, 0.0})), InvalidArgument);
  GaussLinReg g = small_linreg(10, 2, 1);
  g.prior_var = -1.0;
  EXPECT_THROW(validate(ModelSpec(g)), InvalidArgument);
  LogitReg l;
  static_cast<BinaryRegression&>(l) = small_binary(10, 1, false);
  l.y[0] = 0.5;
  EXPECT_THROW(validate(ModelSpec(l)), InvalidArgument);
}

TEST(LogJoint, DerivativesToyAndLinreg) {
  check_derivs(latent_gaussian_view(ModelSpec(ToyGaussian{2.0, 3.0, 1.0})), Vector(0), Vector::Constant(1, 0.4));
  const auto view = latent_gaussian_view(ModelSpec(small_linreg(30, 3, 2)));
  Vector eta(3);
  eta << 0.3, 0.9, 1.4;
  check_derivs(view, Vector::Constant(1, 0.6), eta);
}

TEST(LogJoint, DerivativesBinary) {
  ProbitReg p;
  static_cast<BinaryRegression&>(p) = small_binary(40, 3, true);
  check_derivs(latent_gaussian_view(ModelSpec(p)), Vector(0), Vector::Constant(1, 0.7));
  const auto pima = dataio::standardize(dataio::load_bundled(kData, "pima"), {"npreg", "glu", "bmi", "ped"});
  const auto logit = make_logit(pima, "diabetes", {"npreg", "glu", "bmi", "ped"}, 1.0, 100.0);
  Vector eta(5);
  eta << -0.9, 0.4, 1.1, 0.6, 0.5;
  check_derivs(latent_gaussian_view(ModelSpec(logit)), Vector(0), eta);
}

TEST(LogJoint, DerivativesGlmm) {
  const auto view = latent_gaussian_view(ModelSpec(epilepsy_glmm()));
  RngStream rng(3, 0);
  Vector eta(120);
  for (Eigen::Index i = 0; i < 120; ++i) eta[i] = 0.2 * rng.normal();
  eta[0] = 1.5;
  Vector theta(3);
  theta << 0.4, 0.9, -0.3;
  check_derivs(view, theta, eta);
}

TEST(LatentView, WishartBlockRoundTrip) {
  Matrix p(2, 2);
  p << 2.0, -0.4, -0.4, 0.8;
  const Vector th = wishart_block_theta(p);
  EXPECT_LT((wishart_block_precision(th) - p).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(LatentView, PrecisionIsBlockDiagonal) {
  const auto view = latent_gaussian_view(ModelSpec(epilepsy_glmm()));
  Vector theta(3);
  theta << 0.1, 0.2, 0.3;
  const Matrix q = view.precision(theta);
  const Matrix d = wishart_block_precision(theta);
  EXPECT_NEAR(q(0, 0), 1.0 / 100.0, 1e-15);
  EXPECT_LT((q.block(4, 4, 2, 2) - d).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((q.block(118, 118, 2, 2) - d).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_EQ(q(4, 6), 0.0);
}

TEST(Kernels, GibbsLinregFixedVarianceMean) {
  // A Gamma prior of shape 1e7 pins 1/sigma^2 at 2, so the beta chain must
  // match the conjugate posterior with sigma^2 = 0.5.
  GaussLinReg m = small_linreg(200, 3, 4);
  m.gamma_shape = 1e7;
  m.gamma_rate = 5e6;
  const double s2 = 0.5;
  const Matrix prec = m.X.transpose() * m.X / s2 + Matrix::Identity(3, 3) / m.prior_var;
  const Vector oracle = prec.ldlt().solve(m.X.transpose() * m.y / s2 + Vector::Constant(3, m.prior_mean / m.prior_var));

  RngStream rng(5, 0);
  GaussLinRegState s{Vector::Zero(3), 1.0};
  std::vector<std::vector<double>> draws(3);
  for (int i = 0; i < 20000; ++i) {
    s = gibbs_step_gausslinreg(m, s, rng);
    if (i >= 500)
      for (int j = 0; j < 3; ++j) draws[j].push_back(s.beta[j]);
  }
  for (int j = 0; j < 3; ++j) {
    const double se = numkit::batch_means_se(draws[j], 50);
    EXPECT_NEAR(numkit::mean(draws[j]), oracle[j], 3.5 * se) << "coefficient " << j;
  }
}

TEST(Kernels, GibbsLinregPrecisionMarginalKs) {
  const GaussLinReg m = small_linreg(40, 3, 6);
  // p(tau | y) on a log-tau grid from the marginal likelihood N(y; X mu, I/tau + s2 X X^T)
  const Matrix xxt = m.X * m.X.transpose();
  const Vector r = m.y - m.X * Vector::Constant(3, m.prior_mean);
  const int ng = 3000;
  std::vector<double> grid(ng), lw(ng);
  for (int i = 0; i < ng; ++i) {
    grid[i] = -3.0 + 6.0 * i / (ng - 1);  // log tau
    const double tau = std::exp(grid[i]);
    const Matrix cov = Matrix::Identity(40, 40) / tau + m.prior_var * xxt;
    const auto c = numkit::chol_logdet(cov);
    lw[i] = -0.5 * (c.log_det + r.dot(c.solve(r))) + m.gamma_shape * grid[i] - m.gamma_rate * tau;
  }
  const double mx = *std::max_element(lw.begin(), lw.end());
  std::vector<double> cdf(ng, 0.0);
  for (int i = 1; i < ng; ++i) cdf[i] = cdf[i - 1] + 0.5 * (std::exp(lw[i] - mx) + std::exp(lw[i - 1] - mx));
  for (auto& c : cdf) c /= cdf.back();

  RngStream rng(7, 0);
  GaussLinRegState s{Vector::Zero(3), 1.0};
  std::vector<double> logtau;
  for (int i = 0; i < 50500; ++i) {
    s = gibbs_step_gausslinreg(m, s, rng);
    if (i >= 500) logtau.push_back(-std::log(s.sigma2));
  }
  std::sort(logtau.begin(), logtau.end());
  double ks = 0.0;
  for (std::size_t k = 0; k < logtau.size(); k += 10) {
    const auto it = std::lower_bound(grid.begin(), grid.end(), logtau[k]);
    const auto i = static_cast<std::size_t>(std::clamp<long>(it - grid.begin(), 0, ng - 1));
    ks = std::max(ks, std::abs(cdf[i] - static_cast<double>(k) / logtau.size()));
  }
  EXPECT_LT(ks, 0.02);
}

TEST(Kernels, ProbitGibbsMatchesQuadrature) {
  ProbitReg m;
  static_cast<BinaryRegression&>(m) = small_binary(50, 8, true);
  const double oracle = quadrature_posterior_mean(m, true);
  RngStream rng(9, 0);
  ProbitGibbs gibbs(m);
  ProbitState s{Vector::Zero(1), gibbs.draw_latent(Vector::Zero(1), rng)};
  std::vector<double> b;
  for (int i = 0; i < 50000; ++i) {
    s = gibbs.step(s, rng);
    if (i >= 1000) b.push_back(s.beta[0]);
  }
  EXPECT_NEAR(numkit::mean(b), oracle, 3.0 * numkit::batch_means_se(b, 50));
}

TEST(Kernels, ProbitSeparationDriftsPositive) {
  ProbitReg m;
  static_cast<BinaryRegression&>(m) = small_binary(30, 10, true);
  m.X = Matrix::Ones(30, 1);
  m.y = Vector::Ones(30);
  m.prior_var = 1e4;
  RngStream rng(10, 0);
  ProbitState s{Vector::Zero(1), ProbitGibbs(m).draw_latent(Vector::Zero(1), rng)};
  int positive = 0, total = 0;
  for (int i = 0; i < 5000; ++i) {
    s = gibbs_step_probit(m, s, rng);
    if (i >= 500) {
      ++total;
      if (s.beta[0] > 0.0) ++positive;
    }
  }
  EXPECT_GT(static_cast<double>(positive) / total, 0.99);
}

TEST(Kernels, LogitRwAcceptanceOnPima) {
  const std::vector<std::string> cov{"npreg", "glu", "bmi", "ped"};
  const auto pima = dataio::standardize(dataio::load_bundled(kData, "pima"), cov);
  const LogitReg m = make_logit(pima, "diabetes", cov, 1.0, 100.0);
  const BinaryPosterior post(m, Likelihood::Logit);
  const Vector mode = post.mode();
  const Matrix cov_prop = scaled_proposal_cov(Matrix::Identity(5, 5) / 100.0, post.likelihood_curvature(mode), 1.0);
  RngStream rng(11, 0);
  Vector beta = mode;
  int accepted = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) {
    const MhStep st = rw_mh_step_logit(m, beta, cov_prop, rng);
    beta = st.state;
    accepted += st.accepted ? 1 : 0;
    ASSERT_LE(st.log_alpha, 0.0);
  }
  const double rate = static_cast<double>(accepted) / n;
  EXPECT_GE(rate, 0.15);
  EXPECT_LE(rate, 0.5);
}

TEST(Kernels, LogitRwMatchesQuadrature) {
  LogitReg m;
  static_cast<BinaryRegression&>(m) = small_binary(50, 12, false);
  const double oracle = quadrature_posterior_mean(m, false);
  const BinaryPosterior post(m, Likelihood::Logit);
  const Matrix c = scaled_proposal_cov(Matrix::Identity(1, 1) / m.prior_var, post.likelihood_curvature(post.mode()), 1.0);
  RngStream rng(13, 0);
  Vector beta = Vector::Zero(1);
  std::vector<double> b;
  for (int i = 0; i < 100000; ++i) {
    beta = rw_mh_step_logit(m, beta, c, rng).state;
    if (i >= 1000) b.push_back(beta[0]);
  }
  EXPECT_NEAR(numkit::mean(b), oracle, 3.0 * numkit::batch_means_se(b, 50));
}

TEST(Kernels, RwMhRejectsInvalidTarget) {
  RngStream rng(14, 0);
  const auto target = [](const Vector& x) -> double {
    if (x[0] < 0) throw InvalidArgument("outside support");
    return -x[0];
  };
  Vector x = Vector::Constant(1, 0.01);
  for (int i = 0; i < 2000; ++i) {
    x = rw_mh_step(target, x, target(x), Matrix::Identity(1, 1), rng).state;
    ASSERT_GE(x[0], 0.0);
  }
}

TEST(Kernels, GaussianConditionalNormalised) {
  // the beta full conditional integrates to one: compare with MvNormal density
  const GaussLinReg m = small_linreg(20, 2, 15);
  const GaussLinRegGibbs g(m);
  const GaussianConditional c = g.beta_conditional(0.8);
  const Matrix cov = c.precision.inverse();
  Vector x(2);
  x << 0.2, 1.1;
  EXPECT_NEAR(c.log_density(x), numkit::log_density(numkit::MvNormal{c.mean, cov}, x), 1e-10);
}

TEST(Tempered, ZeroTemperatureKeepsPrior) {
  // at t = 0 the GLMM kernel targets the prior; check the fixed-effect variance
  const TemperedTarget target{ModelSpec(epilepsy_glmm())};
  RngStream rng(16, 0);
  Vector psi = target.sample_prior(rng);
  const auto k = target.tuning(0.0);
  std::vector<double> b0;
  for (int i = 0; i < 20000; ++i) {
    target.sweep(psi, k, rng);
    b0.push_back(psi[0]);
  }
  EXPECT_NEAR(numkit::mean(b0), 0.0, 3.0 * numkit::batch_means_se(b0, 20) + 0.05);
  EXPECT_NEAR(numkit::stddev(b0), 10.0, 1.0);
}
