#include "evidence/modelzoo/kernels.hpp"

#include "evidence/errors.hpp"
#include "evidence/numkit/special.hpp"

#include <cmath>

namespace evidence::modelzoo {

namespace {
Vector standard_normal_vector(Eigen::Index n, RngStream& rng) {
  Vector z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.normal();
  return z;
}
}  // namespace

double GaussianConditional::log_density(const Vector& x) const {
  const Vector w = precision.lower.transpose() * (x - mean);
  return -0.5 * (static_cast<double>(x.size()) * numkit::kLogTwoPi - precision.log_det + w.squaredNorm());
}

Vector GaussianConditional::sample(RngStream& rng) const {
  return mean + precision.solve_upper(standard_normal_vector(mean.size(), rng));
}

GaussLinRegGibbs::GaussLinRegGibbs(GaussLinReg model) : model_(std::move(model)) {
  validate(model_);
  xtx_ = model_.X.transpose() * model_.X;
  xty_ = model_.X.transpose() * model_.y;
}

GaussianConditional GaussLinRegGibbs::beta_conditional(double sigma2, double temperature) const {
  if (!(sigma2 > 0.0)) throw InvalidArgument("beta_conditional: sigma2 must be positive");
  const auto p = xtx_.rows();
  const double w = temperature / sigma2;
  const Matrix prec = w * xtx_ + Matrix::Identity(p, p) / model_.prior_var;
  GaussianConditional c;
  c.precision = numkit::chol_logdet(prec, "beta full conditional precision");
  c.mean = c.precision.solve(Vector(w * xty_ + Vector::Constant(p, model_.prior_mean / model_.prior_var)));
  return c;
}

numkit::Gamma GaussLinRegGibbs::precision_conditional(const Vector& beta, double temperature) const {
  const double rss = (model_.y - model_.X * beta).squaredNorm();
  const double n = static_cast<double>(model_.y.size());
  return {model_.gamma_shape + 0.5 * temperature * n, model_.gamma_rate + 0.5 * temperature * rss};
}

GaussLinRegState GaussLinRegGibbs::step(const GaussLinRegState& s, RngStream& rng, double temperature) const {
  GaussLinRegState next;
  next.beta = beta_conditional(s.sigma2, temperature).sample(rng);
  const numkit::Gamma g = precision_conditional(next.beta, temperature);
  next.sigma2 = 1.0 / rng.gamma(g.shape, g.rate);
  return next;
}

GaussLinRegState gibbs_step_gausslinreg(const GaussLinReg& m, const GaussLinRegState& s, RngStream& rng) {
  return GaussLinRegGibbs(m).step(s, rng);
}

ProbitGibbs::ProbitGibbs(ProbitReg model) : model_(std::move(model)) {
  validate(model_);
  const auto p = model_.X.cols();
  precision_ = numkit::chol_logdet(model_.X.transpose() * model_.X + Matrix::Identity(p, p) / model_.prior_var,
                                   "probit beta conditional precision");
  prior_shift_ = Vector::Constant(p, model_.prior_mean / model_.prior_var);
}

Vector ProbitGibbs::beta_mean(const Vector& z) const {
  return precision_.solve(Vector(model_.X.transpose() * z + prior_shift_));
}

double ProbitGibbs::log_beta_conditional(const Vector& beta, const Vector& z) const {
  return GaussianConditional{beta_mean(z), precision_}.log_density(beta);
}

Vector ProbitGibbs::draw_latent(const Vector& beta, RngStream& rng) const {
  const Vector lin = model_.X * beta;
  Vector z(lin.size());
  for (Eigen::Index t = 0; t < lin.size(); ++t) {
    // z > 0 iff y = 1
    if (model_.y[t] > 0.5) {
      z[t] = lin[t] + numkit::sample_std_normal_above(-lin[t], rng);
    } else {
      z[t] = lin[t] - numkit::sample_std_normal_above(lin[t], rng);
    }
  }
  return z;
}

ProbitState ProbitGibbs::step(const ProbitState& s, RngStream& rng) const {
  ProbitState next;
  next.z = draw_latent(s.beta, rng);
  next.beta = GaussianConditional{beta_mean(next.z), precision_}.sample(rng);
  return next;
}

ProbitState gibbs_step_probit(const ProbitReg& m, const ProbitState& s, RngStream& rng) {
  return ProbitGibbs(m).step(s, rng);
}

MhStep rw_mh_step(const std::function<double(const Vector&)>& log_target, const Vector& current,
                  double current_log_target, const Matrix& proposal_lower, RngStream& rng) {
  const Vector proposal = current + proposal_lower * standard_normal_vector(current.size(), rng);
  double proposed = -std::numeric_limits<double>::infinity();
  try {
    proposed = log_target(proposal);
  } catch (const InvalidArgument&) {
    // outside the support of the likelihood: reject
  }
  MhStep out;
  out.log_alpha = std::isfinite(proposed) ? std::min(0.0, proposed - current_log_target)
                                          : -std::numeric_limits<double>::infinity();
  if (std::log(rng.uniform()) < out.log_alpha) {
    out.state = proposal;
    out.log_target = proposed;
    out.accepted = true;
  } else {
    out.state = current;
    out.log_target = current_log_target;
  }
  return out;
}

BinaryPosterior::BinaryPosterior(const BinaryRegression& model, Likelihood link)
    : prior_mean_(model.prior_mean), prior_var_(model.prior_var) {
  view_.likelihood = link;
  view_.y = model.y;
  view_.design = model.X;
  view_.offset = Vector::Zero(model.y.size());
  view_.latent_mean = Vector::Constant(model.X.cols(), model.prior_mean);
  view_.hyper = FixedHyper{Matrix::Identity(model.X.cols(), model.X.cols()) / model.prior_var, 1.0};
}

double BinaryPosterior::log_likelihood(const Vector& beta) const {
  return view_.log_likelihood(view_.design * beta, Vector(0));
}

double BinaryPosterior::log_prior(const Vector& beta) const {
  const double d = static_cast<double>(beta.size());
  return -0.5 * d * (numkit::kLogTwoPi + std::log(prior_var_)) -
         0.5 * (beta.array() - prior_mean_).square().sum() / prior_var_;
}

Matrix BinaryPosterior::likelihood_curvature(const Vector& beta) const {
  Vector d1, d2;
  view_.likelihood_derivs(view_.design * beta, Vector(0), d1, d2);
  return view_.design.transpose() * (-d2).asDiagonal() * view_.design;
}

Vector BinaryPosterior::mode() const {
  const auto p = view_.design.cols();
  Vector beta = Vector::Constant(p, prior_mean_);
  double value = log_posterior(beta);
  for (int iter = 0; iter < 100; ++iter) {
    Vector d1, d2;
    view_.likelihood_derivs(view_.design * beta, Vector(0), d1, d2);
    const Vector grad = view_.design.transpose() * d1 - (beta.array() - prior_mean_).matrix() / prior_var_;
    if (grad.lpNorm<Eigen::Infinity>() < 1e-10) break;
    const Matrix h = view_.design.transpose() * (-d2).asDiagonal() * view_.design +
                     Matrix::Identity(p, p) / prior_var_;
    const Vector step = numkit::chol_logdet(h, "BinaryPosterior::mode").solve(grad);
    double scale = 1.0;
    for (int halving = 0; halving < 40; ++halving, scale *= 0.5) {
      const Vector trial = beta + scale * step;
      const double v = log_posterior(trial);
      if (v >= value) {
        beta = trial;
        value = v;
        break;
      }
    }
  }
  return beta;
}

MhStep rw_mh_step_logit(const LogitReg& m, const Vector& beta, const Matrix& proposal_cov, RngStream& rng) {
  const BinaryPosterior post(m, Likelihood::Logit);
  const auto target = [&](const Vector& b) { return post.log_posterior(b); };
  const Matrix lower = numkit::chol_logdet(proposal_cov, "RW-MH proposal covariance").lower;
  return rw_mh_step(target, beta, target(beta), lower, rng);
}

Matrix scaled_proposal_cov(const Matrix& prior_precision, const Matrix& curvature, double temperature) {
  const double d = static_cast<double>(prior_precision.rows());
  const Matrix prec = prior_precision + temperature * curvature;
  return (2.38 * 2.38 / d) * numkit::chol_logdet(prec, "proposal precision").inverse();
}

}  // namespace evidence::modelzoo
