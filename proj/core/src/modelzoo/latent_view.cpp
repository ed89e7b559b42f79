#include "evidence/modelzoo/latent_view.hpp"

#include "evidence/errors.hpp"
#include "evidence/numkit/distributions.hpp"
#include "evidence/numkit/special.hpp"

#include <cmath>

namespace evidence::modelzoo {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

using numkit::kLogTwoPi;

std::vector<std::string> coefficient_names(Eigen::Index count) {
  std::vector<std::string> names;
  for (Eigen::Index i = 0; i < count; ++i) names.push_back("beta" + std::to_string(i));
  return names;
}

LatentGaussianView regression_view(const Vector& y, const Matrix& X, double prior_mean, double prior_var) {
  LatentGaussianView v;
  v.y = y;
  v.design = X;
  v.offset = Vector::Zero(y.size());
  v.latent_mean = Vector::Constant(X.cols(), prior_mean);
  v.latent_names = coefficient_names(X.cols());
  v.hyper = FixedHyper{Matrix::Identity(X.cols(), X.cols()) / prior_var, 1.0};
  return v;
}

}  // namespace

Matrix wishart_block_precision(const Vector& theta) {
  Matrix l(2, 2);
  l << std::exp(theta[0]), 0.0, theta[2], std::exp(theta[1]);
  return l * l.transpose();
}

Vector wishart_block_theta(const Matrix& precision) {
  const auto c = numkit::chol_logdet(precision, "wishart_block_theta");
  Vector theta(3);
  theta << std::log(c.lower(0, 0)), std::log(c.lower(1, 1)), c.lower(1, 0);
  return theta;
}

LatentGaussianView latent_gaussian_view(const ModelSpec& spec) {
  validate(spec);
  return std::visit(
      overloaded{
          [](const ToyGaussian& m) {
            LatentGaussianView v;
            v.likelihood = Likelihood::Gaussian;
            v.y = Vector::Constant(1, m.y);
            v.design = Matrix::Ones(1, 1);
            v.offset = Vector::Zero(1);
            v.latent_mean = Vector::Zero(1);
            v.latent_names = {"eta"};
            v.hyper = FixedHyper{Matrix::Constant(1, 1, 1.0 / (m.sigma0 * m.sigma0)),
                                 1.0 / (m.sigma1 * m.sigma1)};
            return v;
          },
          [](const GaussLinReg& m) {
            LatentGaussianView v = regression_view(m.y, m.X, m.prior_mean, m.prior_var);
            v.likelihood = Likelihood::Gaussian;
            v.hyper = GammaPrecisionHyper{Matrix::Identity(m.X.cols(), m.X.cols()) / m.prior_var,
                                          m.gamma_shape, m.gamma_rate};
            v.theta_names = {"log_precision"};
            return v;
          },
          [](const ProbitReg& m) {
            LatentGaussianView v = regression_view(m.y, m.X, m.prior_mean, m.prior_var);
            v.likelihood = Likelihood::Probit;
            return v;
          },
          [](const LogitReg& m) {
            LatentGaussianView v = regression_view(m.y, m.X, m.prior_mean, m.prior_var);
            v.likelihood = Likelihood::Logit;
            return v;
          },
          [](const PoissonGLMM& m) {
            LatentGaussianView v;
            v.likelihood = Likelihood::Poisson;
            v.y = m.y;
            const Eigen::Index n = m.y.size();
            const Eigen::Index dim = 4 + 2 * m.n_subjects;
            v.design = Matrix::Zero(n, dim);
            for (Eigen::Index t = 0; t < n; ++t) {
              const double x1 = m.period[t], x2 = m.treatment[t];
              const Eigen::Index j = m.subject[static_cast<std::size_t>(t)];
              v.design(t, 0) = 1.0;
              v.design(t, 1) = x1;
              v.design(t, 2) = x2;
              v.design(t, 3) = x1 * x2;
              v.design(t, 4 + 2 * j) = 1.0;
              v.design(t, 5 + 2 * j) = x1;
            }
            v.offset = m.exposure.array().log();
            v.latent_mean = Vector::Zero(dim);
            v.latent_names = coefficient_names(4);
            for (int j = 0; j < m.n_subjects; ++j) {
              v.latent_names.push_back("u" + std::to_string(j + 1) + "_0");
              v.latent_names.push_back("u" + std::to_string(j + 1) + "_1");
            }
            v.hyper = WishartBlockHyper{4, m.beta_prior_var, static_cast<std::size_t>(m.n_subjects),
                                        m.wishart_df, m.wishart_scale};
            v.theta_names = {"log_L11", "log_L22", "L21"};
            return v;
          },
      },
      spec);
}

std::size_t LatentGaussianView::theta_dim() const {
  return std::visit(overloaded{[](const FixedHyper&) -> std::size_t { return 0; },
                               [](const GammaPrecisionHyper&) -> std::size_t { return 1; },
                               [](const WishartBlockHyper&) -> std::size_t { return 3; }},
                    hyper);
}

Matrix LatentGaussianView::precision(const Vector& theta) const {
  return std::visit(overloaded{
                        [](const FixedHyper& h) { return h.precision; },
                        [](const GammaPrecisionHyper& h) { return h.precision; },
                        [&](const WishartBlockHyper& h) {
                          const auto d = static_cast<Eigen::Index>(h.n_fixed + 2 * h.n_groups);
                          Matrix q = Matrix::Zero(d, d);
                          const auto nf = static_cast<Eigen::Index>(h.n_fixed);
                          q.topLeftCorner(nf, nf) = Matrix::Identity(nf, nf) / h.fixed_var;
                          const Matrix p = wishart_block_precision(theta);
                          for (std::size_t j = 0; j < h.n_groups; ++j) {
                            q.block<2, 2>(nf + 2 * static_cast<Eigen::Index>(j), nf + 2 * static_cast<Eigen::Index>(j)) = p;
                          }
                          return q;
                        },
                    },
                    hyper);
}

double LatentGaussianView::obs_precision(const Vector& theta) const {
  if (likelihood != Likelihood::Gaussian) throw InvalidArgument("obs_precision: not a Gaussian likelihood");
  if (const auto* f = std::get_if<FixedHyper>(&hyper)) return f->obs_precision;
  if (std::holds_alternative<GammaPrecisionHyper>(hyper)) return std::exp(theta[0]);
  throw InvalidArgument("obs_precision: unsupported hyperparameter structure");
}

double LatentGaussianView::log_theta_jacobian(const Vector& theta) const {
  return std::visit(overloaded{
                        [](const FixedHyper&) { return 0.0; },
                        [&](const GammaPrecisionHyper&) { return theta[0]; },
                        [&](const WishartBlockHyper&) { return std::log(4.0) + 3.0 * theta[0] + 2.0 * theta[1]; },
                    },
                    hyper);
}

double LatentGaussianView::log_theta_prior(const Vector& theta) const {
  if (static_cast<std::size_t>(theta.size()) != theta_dim()) {
    throw InvalidArgument("log_theta_prior: theta has wrong dimension");
  }
  return std::visit(
      overloaded{
          [](const FixedHyper&) { return 0.0; },
          [&](const GammaPrecisionHyper& h) {
            return numkit::log_density(numkit::Gamma{h.shape, h.rate}, std::exp(theta[0])) + theta[0];
          },
          [&](const WishartBlockHyper& h) {
            return numkit::log_density(numkit::Wishart{h.df, h.scale}, wishart_block_precision(theta)) +
                   log_theta_jacobian(theta);
          },
      },
      hyper);
}

Vector LatentGaussianView::initial_theta() const {
  return std::visit(overloaded{
                        [](const FixedHyper&) -> Vector { return Vector(0); },
                        [&](const GammaPrecisionHyper& h) -> Vector {
                          const double n = static_cast<double>(y.size());
                          const double ss = (y.array() - y.mean()).square().sum();
                          return Vector::Constant(1, std::log((h.shape + 0.5 * n) / (h.rate + 0.5 * ss)));
                        },
                        [](const WishartBlockHyper& h) { return wishart_block_theta(h.df * h.scale); },
                    },
                    hyper);
}

Vector LatentGaussianView::sample_theta_prior(numkit::RngStream& rng) const {
  return std::visit(overloaded{
                        [](const FixedHyper&) -> Vector { return Vector(0); },
                        [&](const GammaPrecisionHyper& h) -> Vector {
                          return Vector::Constant(1, std::log(rng.gamma(h.shape, h.rate)));
                        },
                        [&](const WishartBlockHyper& h) {
                          return wishart_block_theta(numkit::sample(numkit::Wishart{h.df, h.scale}, rng));
                        },
                    },
                    hyper);
}

double LatentGaussianView::log_likelihood(const Vector& lin, const Vector& theta) const {
  const Eigen::Index n = y.size();
  double sum = 0.0;
  switch (likelihood) {
    case Likelihood::Gaussian: {
      const double tau = obs_precision(theta);
      const double ss = (y - lin).squaredNorm();
      sum = 0.5 * static_cast<double>(n) * (std::log(tau) - kLogTwoPi) - 0.5 * tau * ss;
      break;
    }
    case Likelihood::Probit:
      for (Eigen::Index t = 0; t < n; ++t) sum += numkit::log_norm_cdf(y[t] > 0.5 ? lin[t] : -lin[t]);
      break;
    case Likelihood::Logit:
      for (Eigen::Index t = 0; t < n; ++t) sum += y[t] * lin[t] - numkit::log1p_exp(lin[t]);
      break;
    case Likelihood::Poisson:
      for (Eigen::Index t = 0; t < n; ++t) sum += y[t] * lin[t] - std::exp(lin[t]) - std::lgamma(y[t] + 1.0);
      break;
  }
  if (!std::isfinite(sum)) throw InvalidArgument("log_likelihood: non-finite value (linear predictor out of range)");
  return sum;
}

double LatentGaussianView::likelihood_derivs(const Vector& lin, const Vector& theta, Vector& d1,
                                             Vector& d2) const {
  const Eigen::Index n = y.size();
  d1.resize(n);
  d2.resize(n);
  switch (likelihood) {
    case Likelihood::Gaussian: {
      const double tau = obs_precision(theta);
      d1 = tau * (y - lin);
      d2.setConstant(-tau);
      break;
    }
    case Likelihood::Probit:
      for (Eigen::Index t = 0; t < n; ++t) {
        const double sign = y[t] > 0.5 ? 1.0 : -1.0;
        const double s = sign * lin[t];
        const double m = numkit::inverse_mills(s);
        d1[t] = sign * m;
        d2[t] = -m * (s + m);
      }
      break;
    case Likelihood::Logit:
      for (Eigen::Index t = 0; t < n; ++t) {
        const double p = numkit::logistic(lin[t]);
        d1[t] = y[t] - p;
        d2[t] = -p * (1.0 - p);
      }
      break;
    case Likelihood::Poisson:
      for (Eigen::Index t = 0; t < n; ++t) {
        const double mu = std::exp(lin[t]);
        d1[t] = y[t] - mu;
        d2[t] = -mu;
      }
      break;
  }
  return log_likelihood(lin, theta);
}

double LatentGaussianView::log_latent_prior(const Vector& theta, const Vector& eta) const {
  const Vector centered = eta - latent_mean;
  const double d = static_cast<double>(eta.size());
  if (const auto* h = std::get_if<WishartBlockHyper>(&hyper)) {
    const auto nf = static_cast<Eigen::Index>(h->n_fixed);
    const Matrix p = wishart_block_precision(theta);
    const double log_det_p = 2.0 * (theta[0] + theta[1]);
    double quad = centered.head(nf).squaredNorm() / h->fixed_var;
    for (std::size_t j = 0; j < h->n_groups; ++j) {
      const Vector u = centered.segment<2>(nf + 2 * static_cast<Eigen::Index>(j));
      quad += u.dot(p * u);
    }
    const double log_det = -static_cast<double>(h->n_fixed) * std::log(h->fixed_var) +
                           static_cast<double>(h->n_groups) * log_det_p;
    return 0.5 * (log_det - quad - d * kLogTwoPi);
  }
  const Matrix q = precision(theta);
  const auto c = numkit::chol_logdet(q, "latent prior precision");
  return 0.5 * (c.log_det - centered.dot(q * centered) - d * kLogTwoPi);
}

}  // namespace evidence::modelzoo
