#include "evidence/modelzoo/tempered.hpp"

#include "evidence/errors.hpp"
#include "evidence/numkit/distributions.hpp"
#include "evidence/numkit/special.hpp"

#include <cmath>

namespace evidence::modelzoo {

namespace {

constexpr Eigen::Index kFixed = 4;  // GLMM fixed effects

Vector std_normals(Eigen::Index n, RngStream& rng) {
  Vector z(n);
  for (Eigen::Index i = 0; i < n; ++i) z[i] = rng.normal();
  return z;
}

double poisson_loglik_rows(const LatentGaussianView& v, const Vector& lin, const std::vector<Eigen::Index>& rows) {
  double s = 0.0;
  for (auto t : rows) s += v.y[t] * lin[t] - std::exp(lin[t]) - std::lgamma(v.y[t] + 1.0);
  return s;
}

}  // namespace

TemperedTarget::TemperedTarget(ModelSpec model)
    : model_(std::move(model)), view_(latent_gaussian_view(model_)), kind_(kind_of(model_)) {
  if (kind_ == ModelKind::ProbitReg || kind_ == ModelKind::LogitReg) {
    const auto& b = kind_ == ModelKind::ProbitReg ? static_cast<const BinaryRegression&>(std::get<ProbitReg>(model_))
                                                   : static_cast<const BinaryRegression&>(std::get<LogitReg>(model_));
    const BinaryPosterior post(b, view_.likelihood);
    mode_ = post.mode();
    curvature_ = post.likelihood_curvature(mode_);
  } else if (kind_ == ModelKind::PoissonGLMM) {
    const auto& g = std::get<PoissonGLMM>(model_);
    subject_rows_.assign(static_cast<std::size_t>(g.n_subjects), {});
    for (Eigen::Index t = 0; t < g.y.size(); ++t) subject_rows_[static_cast<std::size_t>(g.subject[static_cast<std::size_t>(t)])].push_back(t);
    // Poisson curvature is the mean; the data stand in for it at the mode.
    const Vector w = g.y.cwiseMax(0.5);
    const Matrix xf = view_.design.leftCols(kFixed);
    curvature_ = xf.transpose() * w.asDiagonal() * xf;
    for (const auto& rows : subject_rows_) {
      Matrix h = Matrix::Zero(2, 2);
      for (auto t : rows) {
        Eigen::Vector2d z(1.0, g.period[t]);
        h += w[t] * z * z.transpose();
      }
      subject_curvature_.push_back(h);
    }
  }
}

std::string_view TemperedTarget::kernel_name() const {
  switch (kind_) {
    case ModelKind::ToyGaussian: return "exact-toy";
    case ModelKind::GaussLinReg: return "gibbs-gausslinreg";
    case ModelKind::ProbitReg: return "rw-mh-probit";
    case ModelKind::LogitReg: return "rw-mh-logit";
    case ModelKind::PoissonGLMM: return "mh-within-gibbs-glmm";
  }
  return "unknown";
}

double TemperedTarget::log_likelihood(const Vector& psi) const {
  const Vector eta = psi_latent(view_, psi);
  return view_.log_likelihood(view_.linear_predictor(eta), psi_theta(view_, psi));
}

double TemperedTarget::log_prior(const Vector& psi) const {
  const Vector theta = psi_theta(view_, psi);
  return view_.log_latent_prior(theta, psi_latent(view_, psi)) + view_.log_theta_prior(theta);
}

Vector TemperedTarget::sample_prior(RngStream& rng) const {
  const Vector theta = view_.sample_theta_prior(rng);
  const auto q = numkit::chol_logdet(view_.precision(theta), "latent prior precision");
  const Vector eta = view_.latent_mean + q.solve_upper(std_normals(view_.design.cols(), rng));
  return join_psi(eta, theta);
}

Vector TemperedTarget::initial_state() const {
  switch (kind_) {
    case ModelKind::ToyGaussian: {
      const auto& m = std::get<ToyGaussian>(model_);
      const double s0 = m.sigma0 * m.sigma0, s1 = m.sigma1 * m.sigma1;
      return Vector::Constant(1, m.y * s0 / (s0 + s1));
    }
    case ModelKind::GaussLinReg: {
      const auto& m = std::get<GaussLinReg>(model_);
      const double n = static_cast<double>(m.y.size());
      const double s2 = std::max((m.y.array() - m.y.mean()).square().sum() / std::max(n - 1.0, 1.0), 1e-8);
      const Vector beta = GaussLinRegGibbs(m).beta_conditional(s2).mean;
      const double rss = (m.y - m.X * beta).squaredNorm();
      const double tau = (m.gamma_shape + 0.5 * n) / (m.gamma_rate + 0.5 * rss);
      return join_psi(beta, Vector::Constant(1, std::log(tau)));
    }
    case ModelKind::ProbitReg:
    case ModelKind::LogitReg:
      return mode_;
    case ModelKind::PoissonGLMM: {
      const auto& g = std::get<PoissonGLMM>(model_);
      Vector eta = Vector::Zero(view_.design.cols());
      eta[0] = std::log(std::max(g.y.sum() / g.exposure.sum(), 1e-3));
      Matrix p = Matrix::Identity(2, 2) * 4.0;
      return join_psi(eta, wishart_block_theta(p));
    }
  }
  throw InvalidArgument("initial_state: unsupported model");
}

KernelTuning TemperedTarget::tuning(double temperature) const {
  if (!(temperature >= 0.0 && temperature <= 1.0)) throw InvalidArgument("temperature must lie in [0, 1]");
  KernelTuning k;
  k.temperature = temperature;
  if (kind_ == ModelKind::ProbitReg || kind_ == ModelKind::LogitReg) {
    const Matrix q = view_.precision(Vector(0));
    k.proposal_lower = numkit::chol_logdet(scaled_proposal_cov(q, curvature_, temperature), "proposal").lower;
  } else if (kind_ == ModelKind::PoissonGLMM) {
    const auto& g = std::get<PoissonGLMM>(model_);
    const Matrix q = Matrix::Identity(kFixed, kFixed) / g.beta_prior_var;
    k.proposal_lower = numkit::chol_logdet(scaled_proposal_cov(q, curvature_, temperature), "proposal").lower;
  }
  return k;
}

void TemperedTarget::sweep(Vector& psi, const KernelTuning& k, RngStream& rng, SweepStats* stats) const {
  const double t = k.temperature;
  switch (kind_) {
    case ModelKind::ToyGaussian: {
      const auto& m = std::get<ToyGaussian>(model_);
      const double prec = 1.0 / (m.sigma0 * m.sigma0) + t / (m.sigma1 * m.sigma1);
      const double mean = t * m.y / (m.sigma1 * m.sigma1) / prec;
      psi[0] = mean + rng.normal() / std::sqrt(prec);
      return;
    }
    case ModelKind::GaussLinReg: {
      const GaussLinRegGibbs gibbs(std::get<GaussLinReg>(model_));
      const auto p = static_cast<Eigen::Index>(view_.latent_dim());
      GaussLinRegState s{psi.head(p), std::exp(-psi[p])};
      s = gibbs.step(s, rng, t);
      psi.head(p) = s.beta;
      psi[p] = -std::log(s.sigma2);
      return;
    }
    case ModelKind::ProbitReg:
    case ModelKind::LogitReg:
      sweep_binary(psi, k, rng, stats);
      return;
    case ModelKind::PoissonGLMM:
      sweep_glmm(psi, k, rng, stats);
      return;
  }
}

void TemperedTarget::sweep_binary(Vector& psi, const KernelTuning& k, RngStream& rng, SweepStats* stats) const {
  const double t = k.temperature;
  const auto target = [&](const Vector& b) {
    return t * view_.log_likelihood(view_.design * b, Vector(0)) + view_.log_latent_prior(Vector(0), b);
  };
  // one sweep = d joint proposals, the cost of a single-site pass
  double lt = target(psi);
  for (Eigen::Index i = 0; i < psi.size(); ++i) {
    const MhStep step = rw_mh_step(target, psi, lt, k.proposal_lower, rng);
    psi = step.state;
    lt = step.log_target;
    if (stats != nullptr) {
      ++stats->proposals;
      if (step.accepted) ++stats->accepts;
    }
  }
}

void TemperedTarget::sweep_glmm(Vector& psi, const KernelTuning& k, RngStream& rng, SweepStats* stats) const {
  const auto& g = std::get<PoissonGLMM>(model_);
  const double t = k.temperature;
  const auto dim = static_cast<Eigen::Index>(view_.latent_dim());
  Vector eta = psi.head(dim);
  Vector theta = psi.tail(3);
  Vector lin = view_.linear_predictor(eta);
  const auto record = [&](bool accepted) {
    if (stats == nullptr) return;
    ++stats->proposals;
    if (accepted) ++stats->accepts;
  };

  // fixed effects, joint random walk
  {
    const Vector beta = eta.head(kFixed);
    const Vector prop = beta + k.proposal_lower * std_normals(kFixed, rng);
    const Vector dlin = view_.design.leftCols(kFixed) * (prop - beta);
    const Vector plin = lin + dlin;
    double cur = 0.0, nxt = 0.0;
    for (Eigen::Index r = 0; r < lin.size(); ++r) {
      cur += g.y[r] * lin[r] - std::exp(lin[r]);
      nxt += g.y[r] * plin[r] - std::exp(plin[r]);
    }
    const double log_a = t * (nxt - cur) - 0.5 * (prop.squaredNorm() - beta.squaredNorm()) / g.beta_prior_var;
    const bool accept = std::log(rng.uniform()) < log_a;
    if (accept) {
      eta.head(kFixed) = prop;
      lin = plin;
    }
    record(accept);
  }

  // random-effect pairs, one subject at a time
  const Matrix p = wishart_block_precision(theta);
  for (std::size_t j = 0; j < subject_rows_.size(); ++j) {
    const Eigen::Index off = kFixed + 2 * static_cast<Eigen::Index>(j);
    const Matrix cov = scaled_proposal_cov(p, subject_curvature_[j], t);
    const Eigen::Matrix2d lower = Eigen::Matrix2d(cov).llt().matrixL();
    const Eigen::Vector2d u = eta.segment<2>(off);
    const Eigen::Vector2d prop = u + lower * Eigen::Vector2d(rng.normal(), rng.normal());
    const Eigen::Vector2d du = prop - u;
    Vector plin = lin;
    for (auto r : subject_rows_[j]) plin[r] += du[0] + du[1] * g.period[r];
    const double dl = poisson_loglik_rows(view_, plin, subject_rows_[j]) - poisson_loglik_rows(view_, lin, subject_rows_[j]);
    const double dprior = -0.5 * (prop.dot(p * prop) - u.dot(p * u));
    const bool accept = std::log(rng.uniform()) < t * dl + dprior;
    if (accept) {
      eta.segment<2>(off) = prop;
      for (auto r : subject_rows_[j]) lin[r] = plin[r];
    }
    record(accept);
  }

  // D^{-1} | u ~ Wishart(df + J, (S^{-1} + sum u u^T)^{-1})
  Matrix ss = g.wishart_scale.inverse();
  for (std::size_t j = 0; j < subject_rows_.size(); ++j) {
    const Eigen::Vector2d u = eta.segment<2>(kFixed + 2 * static_cast<Eigen::Index>(j));
    ss += u * u.transpose();
  }
  const Matrix scale = numkit::chol_logdet(ss, "Wishart conditional").inverse();
  const Matrix scale_lower = numkit::chol_logdet(numkit::symmetrize(scale), "Wishart conditional").lower;
  const Matrix draw = numkit::sample_wishart_chol(g.wishart_df + static_cast<double>(subject_rows_.size()), scale_lower, rng);
  theta = wishart_block_theta(numkit::symmetrize(draw));

  psi.head(dim) = eta;
  psi.tail(3) = theta;
}

}  // namespace evidence::modelzoo
