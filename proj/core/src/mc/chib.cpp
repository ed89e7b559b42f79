#include "common.hpp"
#include "evidence/errors.hpp"
#include "evidence/inla/inla.hpp"
#include "evidence/mc/estimators.hpp"
#include "evidence/modelzoo/kernels.hpp"
#include "evidence/numkit/distributions.hpp"
#include "evidence/numkit/special.hpp"

#include <algorithm>
#include <cmath>

namespace evidence::mc {

using numkit::Matrix;
using numkit::Vector;

namespace {

// Column-wise mean or median of the stored draws (one draw per column).
Vector ordinate_point(const Matrix& draws, OrdinatePoint rule) {
  if (rule == OrdinatePoint::PosteriorMean) return draws.rowwise().mean();
  Vector out(draws.rows());
  std::vector<double> row(static_cast<std::size_t>(draws.cols()));
  for (Eigen::Index i = 0; i < draws.rows(); ++i) {
    for (Eigen::Index g = 0; g < draws.cols(); ++g) row[static_cast<std::size_t>(g)] = draws(i, g);
    const auto mid = row.begin() + static_cast<std::ptrdiff_t>(row.size() / 2);
    std::nth_element(row.begin(), mid, row.end());
    double med = *mid;
    if (row.size() % 2 == 0) med = 0.5 * (med + *std::max_element(row.begin(), mid));
    out[i] = med;
  }
  return out;
}

double iid_normal_log_density(const Vector& x, double mean, double var) {
  const double d = static_cast<double>(x.size());
  return -0.5 * d * (numkit::kLogTwoPi + std::log(var)) - 0.5 * (x.array() - mean).square().sum() / var;
}

const char* ordinate_name(OrdinatePoint p) {
  return p == OrdinatePoint::PosteriorMean ? "posterior-mean" : "posterior-median";
}

}  // namespace

EvidenceEstimate chib_evidence_gausslinreg(const modelzoo::GaussLinReg& m, const EstimatorConfig& cfg, RngStream& rng) {
  validate(cfg);
  const Stopwatch clock;
  const modelzoo::GaussLinRegGibbs gibbs(m);
  const auto p = m.X.cols();
  const double n = static_cast<double>(m.y.size());

  modelzoo::GaussLinRegState s;
  s.sigma2 = std::max((m.y.array() - m.y.mean()).square().sum() / std::max(n - 1.0, 1.0), 1e-8);
  s.beta = gibbs.beta_conditional(s.sigma2).mean;
  for (std::size_t g = 0; g < cfg.burn_in; ++g) s = gibbs.step(s, rng);

  const auto iters = static_cast<Eigen::Index>(cfg.iterations);
  Matrix betas(p, iters);
  Matrix sigma2s(1, iters);
  for (Eigen::Index g = 0; g < iters; ++g) {
    s = gibbs.step(s, rng);
    betas.col(g) = s.beta;
    sigma2s(0, g) = s.sigma2;
  }
  const Vector beta_star = ordinate_point(betas, cfg.ordinate);
  const double sigma2_star = ordinate_point(sigma2s, cfg.ordinate)[0];
  const double tau_star = 1.0 / sigma2_star;

  // Rao-Blackwellised ordinate of beta* over the sigma^2 draws
  std::vector<double> ordinates(cfg.iterations);
  for (Eigen::Index g = 0; g < iters; ++g) {
    ordinates[static_cast<std::size_t>(g)] = gibbs.beta_conditional(sigma2s(0, g)).log_density(beta_star);
  }
  const double log_beta_ordinate = numkit::log_mean_exp(ordinates);

  // sigma^2 enters through tau = 1 / sigma^2; the Jacobian cancels between
  // the prior and the conditional ordinate.
  const numkit::Gamma tau_conditional = gibbs.precision_conditional(beta_star);
  const double rss = (m.y - m.X * beta_star).squaredNorm();
  const double loglik = -0.5 * n * (numkit::kLogTwoPi - std::log(tau_star)) - 0.5 * tau_star * rss;
  const double log_prior = iid_normal_log_density(beta_star, m.prior_mean, m.prior_var) +
                           numkit::log_density(numkit::Gamma{m.gamma_shape, m.gamma_rate}, tau_star);
  const double log_tau_ordinate = numkit::log_density(tau_conditional, tau_star);

  EvidenceEstimate e;
  e.estimator = "chib";
  e.log_ml = loglik + log_prior - log_beta_ordinate - log_tau_ordinate;
  e.mc_se = detail::log_mean_exp_se(ordinates, cfg.batches);
  e.n_iterations = cfg.iterations;
  e.diagnostics["log_likelihood_at_ordinate"] = loglik;
  e.diagnostics["log_beta_ordinate"] = log_beta_ordinate;
  e.diagnostics["log_sigma_ordinate"] = log_tau_ordinate;
  e.notes["ordinate_point"] = ordinate_name(cfg.ordinate);
  e.wall_time = clock.seconds();
  check_estimate(e);
  return e;
}

EvidenceEstimate chib_evidence_probit(const modelzoo::ProbitReg& m, const EstimatorConfig& cfg, RngStream& rng) {
  validate(cfg);
  const Stopwatch clock;
  const modelzoo::ProbitGibbs gibbs(m);
  const auto p = m.X.cols();

  modelzoo::ProbitState s;
  s.beta = Vector::Constant(p, m.prior_mean);
  s.z = gibbs.draw_latent(s.beta, rng);
  for (std::size_t g = 0; g < cfg.burn_in; ++g) s = gibbs.step(s, rng);

  // beta | z depends on z only through X^T z, so that is all we keep
  const auto iters = static_cast<Eigen::Index>(cfg.iterations);
  Matrix betas(p, iters), xtz(p, iters);
  for (Eigen::Index g = 0; g < iters; ++g) {
    s = gibbs.step(s, rng);
    betas.col(g) = s.beta;
    xtz.col(g) = m.X.transpose() * s.z;
  }
  const Vector beta_star = ordinate_point(betas, cfg.ordinate);

  const auto& prec = gibbs.beta_precision();
  const Vector shift = Vector::Constant(p, m.prior_mean / m.prior_var);
  std::vector<double> ordinates(cfg.iterations);
  for (Eigen::Index g = 0; g < iters; ++g) {
    const modelzoo::GaussianConditional c{prec.solve(Vector(xtz.col(g) + shift)), prec};
    ordinates[static_cast<std::size_t>(g)] = c.log_density(beta_star);
  }
  const double log_ordinate = numkit::log_mean_exp(ordinates);

  const Vector lin = m.X * beta_star;
  double loglik = 0.0;
  for (Eigen::Index t = 0; t < lin.size(); ++t) loglik += numkit::log_norm_cdf(m.y[t] > 0.5 ? lin[t] : -lin[t]);
  const double log_prior = iid_normal_log_density(beta_star, m.prior_mean, m.prior_var);

  EvidenceEstimate e;
  e.estimator = "chib";
  e.log_ml = loglik + log_prior - log_ordinate;
  e.mc_se = detail::log_mean_exp_se(ordinates, cfg.batches);
  e.n_iterations = cfg.iterations;
  e.diagnostics["log_likelihood_at_ordinate"] = loglik;
  e.diagnostics["log_beta_ordinate"] = log_ordinate;
  e.notes["ordinate_point"] = ordinate_name(cfg.ordinate);
  e.wall_time = clock.seconds();
  check_estimate(e);
  return e;
}

EvidenceEstimate chib_jeliazkov_evidence(const ModelSpec& m, const EstimatorConfig& cfg, RngStream& rng) {
  validate(cfg);
  const Stopwatch clock;
  const auto view = modelzoo::latent_gaussian_view(m);
  if (view.theta_dim() != 0) throw InvalidArgument("chib_jeliazkov_evidence: model has hyperparameters");
  const Vector empty(0);
  const auto log_post = [&](const Vector& beta) {
    return view.log_likelihood(view.linear_predictor(beta), empty) + view.log_latent_prior(empty, beta);
  };

  // proposal N(0, (2.38^2 / d) H^{-1}) with H the curvature at the mode
  const Vector mode = inla::gaussian_approx(view, empty).mode;
  const auto curvature = modelzoo::log_joint_derivs(view, empty, mode);
  const double d = static_cast<double>(mode.size());
  const Matrix cov = (2.38 * 2.38 / d) *
                     numkit::chol_logdet(numkit::symmetrize(-curvature.hessian), "posterior curvature").inverse();
  const auto prop = numkit::chol_logdet(numkit::symmetrize(cov), "proposal covariance");
  const auto log_q = [&](const Vector& from, const Vector& to) {
    const Vector w = prop.lower.triangularView<Eigen::Lower>().solve(to - from);
    return -0.5 * (d * numkit::kLogTwoPi + prop.log_det + w.squaredNorm());
  };

  Vector beta = mode;
  double lp = log_post(beta);
  std::size_t accepts = 0;
  for (std::size_t g = 0; g < cfg.burn_in; ++g) {
    const auto step = modelzoo::rw_mh_step(log_post, beta, lp, prop.lower, rng);
    beta = step.state;
    lp = step.log_target;
  }
  const auto iters = static_cast<Eigen::Index>(cfg.iterations);
  Matrix draws(mode.size(), iters);
  std::vector<double> draw_lp(cfg.iterations);
  for (Eigen::Index g = 0; g < iters; ++g) {
    const auto step = modelzoo::rw_mh_step(log_post, beta, lp, prop.lower, rng);
    beta = step.state;
    lp = step.log_target;
    if (step.accepted) ++accepts;
    draws.col(g) = beta;
    draw_lp[static_cast<std::size_t>(g)] = lp;
  }
  const Vector star = ordinate_point(draws, cfg.ordinate);
  const double lp_star = log_post(star);

  std::vector<double> numer(cfg.iterations), denom(cfg.iterations);
  for (Eigen::Index g = 0; g < iters; ++g) {
    const auto gi = static_cast<std::size_t>(g);
    const Vector from = draws.col(g);
    numer[gi] = std::min(0.0, lp_star - draw_lp[gi]) + log_q(from, star);
    const Vector to = star + prop.lower * [&] {
      Vector z(mode.size());
      for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
      return z;
    }();
    const double lp_to = log_post(to);
    denom[gi] = std::isfinite(lp_to) ? std::min(0.0, lp_to - lp_star) : -std::numeric_limits<double>::infinity();
  }
  const double log_denom = numkit::log_mean_exp(denom);
  if (!std::isfinite(log_denom)) {
    throw ConvergenceFailure("chib_jeliazkov_evidence: every move away from the ordinate point was rejected");
  }
  const double log_ordinate = numkit::log_mean_exp(numer) - log_denom;

  EvidenceEstimate e;
  e.estimator = "chib-jeliazkov";
  e.log_ml = lp_star - log_ordinate;
  const double se_n = detail::log_mean_exp_se(numer, cfg.batches);
  const double se_d = detail::log_mean_exp_se(denom, cfg.batches);
  e.mc_se = std::sqrt(se_n * se_n + se_d * se_d);
  e.n_iterations = cfg.iterations;
  e.diagnostics["acceptance_rate"] = static_cast<double>(accepts) / static_cast<double>(cfg.iterations);
  e.diagnostics["log_ordinate"] = log_ordinate;
  e.notes["ordinate_point"] = ordinate_name(cfg.ordinate);
  e.wall_time = clock.seconds();
  check_estimate(e);
  return e;
}

}  // namespace evidence::mc
