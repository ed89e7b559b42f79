#pragma once

#include "evidence/modelzoo/latent_view.hpp"
#include "evidence/modelzoo/model_spec.hpp"
#include "evidence/numkit/distributions.hpp"
#include "evidence/numkit/rng.hpp"

#include <functional>

namespace evidence::modelzoo {

using numkit::RngStream;

// ---------------------------------------------------------------------------
// Gaussian linear regression: exact two-block Gibbs sampler.

struct GaussLinRegState {
  Vector beta;
  double sigma2 = 1.0;
};

// Normal law stored through its precision factor.
struct GaussianConditional {
  Vector mean;
  numkit::CholeskyFactor precision;

  double log_density(const Vector& x) const;
  Vector sample(RngStream& rng) const;
};

class GaussLinRegGibbs {
 public:
  explicit GaussLinRegGibbs(GaussLinReg model);

  // beta | sigma^2, y with the likelihood raised to `temperature`.
  GaussianConditional beta_conditional(double sigma2, double temperature = 1.0) const;
  // 1/sigma^2 | beta, y.
  numkit::Gamma precision_conditional(const Vector& beta, double temperature = 1.0) const;

  GaussLinRegState step(const GaussLinRegState& s, RngStream& rng, double temperature = 1.0) const;

  const GaussLinReg& model() const { return model_; }

 private:
  GaussLinReg model_;
  Matrix xtx_;
  Vector xty_;
};

// One sweep: beta from its Normal full conditional, then 1/sigma^2 from its
// Gamma full conditional.
GaussLinRegState gibbs_step_gausslinreg(const GaussLinReg& m, const GaussLinRegState& s, RngStream& rng);

// ---------------------------------------------------------------------------
// Probit regression: Albert-Chib data augmentation.

struct ProbitState {
  Vector beta;
  Vector z;
};

class ProbitGibbs {
 public:
  explicit ProbitGibbs(ProbitReg model);

  // beta | z is N(V (X^T z + mu / s2), V) with V = (X^T X + I / s2)^{-1}.
  Vector beta_mean(const Vector& z) const;
  const numkit::CholeskyFactor& beta_precision() const { return precision_; }
  double log_beta_conditional(const Vector& beta, const Vector& z) const;

  ProbitState step(const ProbitState& s, RngStream& rng) const;
  // Latents drawn given beta, used to initialise a chain.
  Vector draw_latent(const Vector& beta, RngStream& rng) const;

  const ProbitReg& model() const { return model_; }

 private:
  ProbitReg model_;
  numkit::CholeskyFactor precision_;
  Vector prior_shift_;
};

ProbitState gibbs_step_probit(const ProbitReg& m, const ProbitState& s, RngStream& rng);

// ---------------------------------------------------------------------------
// Random-walk Metropolis-Hastings.

struct MhStep {
  Vector state;
  double log_target = 0.0;
  bool accepted = false;
  double log_alpha = 0.0;  // log of the acceptance probability, <= 0
};

// Gaussian random walk with proposal N(current, L L^T).
MhStep rw_mh_step(const std::function<double(const Vector&)>& log_target, const Vector& current,
                  double current_log_target, const Matrix& proposal_lower, RngStream& rng);

// Log posterior of a binary regression at temperature t (likelihood^t x prior).
class BinaryPosterior {
 public:
  BinaryPosterior(const BinaryRegression& model, Likelihood link);

  double log_likelihood(const Vector& beta) const;
  double log_prior(const Vector& beta) const;
  double log_posterior(const Vector& beta, double temperature = 1.0) const {
    return temperature * log_likelihood(beta) + log_prior(beta);
  }
  // Posterior mode by damped Newton.
  Vector mode() const;
  // X^T W X at beta, W the negative second derivative of the log-likelihood.
  Matrix likelihood_curvature(const Vector& beta) const;
  std::size_t dim() const { return static_cast<std::size_t>(view_.design.cols()); }

 private:
  LatentGaussianView view_;
  double prior_mean_;
  double prior_var_;
};

// One RW-MH step on the logit posterior; `proposal_cov` must be SPD.
MhStep rw_mh_step_logit(const LogitReg& m, const Vector& beta, const Matrix& proposal_cov, RngStream& rng);

// Proposal covariance (2.38^2 / d) (Q + t C)^{-1} for a tempered posterior
// with prior precision Q and likelihood curvature C.
Matrix scaled_proposal_cov(const Matrix& prior_precision, const Matrix& curvature, double temperature);

}  // namespace evidence::modelzoo
