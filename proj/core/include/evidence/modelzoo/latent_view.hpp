#pragma once

#include "evidence/modelzoo/model_spec.hpp"
#include "evidence/numkit/rng.hpp"

#include <cstddef>
#include <string>
#include <variant>
#include <vector>

namespace evidence::modelzoo {

enum class Likelihood { Gaussian, Probit, Logit, Poisson };

// Hyperparameter structures. Each knows its latent prior precision Q(theta)
// and the prior of theta on the internal (unconstrained) scale.

// No hyperparameters: Q fixed, Gaussian observation precision fixed.
struct FixedHyper {
  Matrix precision;
  double obs_precision = 1.0;
};

// theta = log(1/sigma^2) with 1/sigma^2 ~ Gamma(shape, rate).
struct GammaPrecisionHyper {
  Matrix precision;
  double shape = 1.0;
  double rate = 1.0;
};

// theta = (log L11, log L22, L21) with D^{-1} = L L^T ~ Wishart2(df, scale);
// Q(theta) = diag(I / fixed_var, D^{-1} for each of n_groups blocks).
struct WishartBlockHyper {
  std::size_t n_fixed = 0;
  double fixed_var = 100.0;
  std::size_t n_groups = 0;
  double df = 4.0;
  Matrix scale = Matrix::Identity(2, 2);
};

using HyperStructure = std::variant<FixedHyper, GammaPrecisionHyper, WishartBlockHyper>;

// Derivatives with respect to the stacked vector (eta, theta).
struct JointDerivs {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;
};

enum class ParamScale { Original, Internal };

// Decomposition of a model into hyperparameters theta, a Gaussian latent
// field eta ~ N(latent_mean, Q(theta)^{-1}), and conditionally independent
// observations whose log-likelihood depends on eta only through the linear
// predictor offset + design * eta.
class LatentGaussianView {
 public:
  Likelihood likelihood = Likelihood::Gaussian;
  Vector y;
  Matrix design;
  Vector offset;
  Vector latent_mean;
  HyperStructure hyper;
  std::vector<std::string> latent_names;
  std::vector<std::string> theta_names;

  std::size_t n_obs() const { return static_cast<std::size_t>(y.size()); }
  std::size_t latent_dim() const { return static_cast<std::size_t>(design.cols()); }
  std::size_t theta_dim() const;

  Matrix precision(const Vector& theta) const;
  // Gaussian likelihoods only.
  double obs_precision(const Vector& theta) const;

  // log p(theta) on the internal scale, including the Jacobian.
  double log_theta_prior(const Vector& theta) const;
  // log |d original / d internal|.
  double log_theta_jacobian(const Vector& theta) const;
  Vector initial_theta() const;
  Vector sample_theta_prior(numkit::RngStream& rng) const;

  Vector linear_predictor(const Vector& eta) const { return offset + design * eta; }

  // Sum over observations of log p(y_t | lin_t, theta).
  double log_likelihood(const Vector& lin, const Vector& theta) const;
  // Per-observation first and second derivatives in the linear predictor;
  // returns the summed log-likelihood.
  double likelihood_derivs(const Vector& lin, const Vector& theta, Vector& d1, Vector& d2) const;

  // log N(eta; latent_mean, Q(theta)^{-1}).
  double log_latent_prior(const Vector& theta, const Vector& eta) const;
};

LatentGaussianView latent_gaussian_view(const ModelSpec& m);

// log p(y | eta, theta) + log p(eta | theta) + log p(theta); the internal
// scale adds the log-Jacobian of the theta transform.
double log_joint(const LatentGaussianView& view, const Vector& theta, const Vector& eta,
                 ParamScale scale = ParamScale::Internal);
double log_joint(const ModelSpec& m, const Vector& theta, const Vector& eta,
                 ParamScale scale = ParamScale::Original);

// Analytic gradient and Hessian of the internal-scale log joint with respect
// to psi = (eta, theta).
JointDerivs log_joint_derivs(const LatentGaussianView& view, const Vector& theta, const Vector& eta);

// Splits / joins psi = (eta, theta).
Vector join_psi(const Vector& eta, const Vector& theta);
Vector psi_latent(const LatentGaussianView& view, const Vector& psi);
Vector psi_theta(const LatentGaussianView& view, const Vector& psi);

// Precision matrix D^{-1} = L L^T from the internal Wishart parameters.
Matrix wishart_block_precision(const Vector& theta);
// Inverse map: internal parameters of an SPD 2x2 precision.
Vector wishart_block_theta(const Matrix& precision);

}  // namespace evidence::modelzoo
