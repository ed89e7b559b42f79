#include "evidence/errors.hpp"
#include "evidence/modelzoo/latent_view.hpp"

#include <array>
#include <cmath>

namespace evidence::modelzoo {

namespace {

void check_dims(const LatentGaussianView& view, const Vector& theta, const Vector& eta) {
  if (static_cast<std::size_t>(theta.size()) != view.theta_dim() ||
      static_cast<std::size_t>(eta.size()) != view.latent_dim()) {
    throw InvalidArgument("log_joint: expected theta of dimension " + std::to_string(view.theta_dim()) +
                          " and eta of dimension " + std::to_string(view.latent_dim()));
  }
}

// First and second derivatives of L(theta) = [[e^t0, 0], [t2, e^t1]] and of
// P = L L^T with respect to theta.
struct CholeskyDerivs {
  Matrix l;
  std::array<Matrix, 3> dl;
  std::array<Matrix, 3> dp;
  std::array<std::array<Matrix, 3>, 3> d2p;
};

CholeskyDerivs cholesky_derivs(const Vector& theta) {
  CholeskyDerivs c;
  c.l = Matrix::Zero(2, 2);
  c.l(0, 0) = std::exp(theta[0]);
  c.l(1, 1) = std::exp(theta[1]);
  c.l(1, 0) = theta[2];
  for (auto& m : c.dl) m = Matrix::Zero(2, 2);
  c.dl[0](0, 0) = c.l(0, 0);
  c.dl[1](1, 1) = c.l(1, 1);
  c.dl[2](1, 0) = 1.0;
  for (int k = 0; k < 3; ++k) c.dp[k] = c.dl[k] * c.l.transpose() + c.l * c.dl[k].transpose();
  for (int k = 0; k < 3; ++k) {
    for (int m = 0; m < 3; ++m) {
      Matrix d2l = Matrix::Zero(2, 2);
      if (k == m && k < 2) d2l = c.dl[k];
      c.d2p[k][m] = d2l * c.l.transpose() + c.l * d2l.transpose() + c.dl[k] * c.dl[m].transpose() +
                    c.dl[m] * c.dl[k].transpose();
    }
  }
  return c;
}

}  // namespace

Vector join_psi(const Vector& eta, const Vector& theta) {
  Vector psi(eta.size() + theta.size());
  psi << eta, theta;
  return psi;
}

Vector psi_latent(const LatentGaussianView& view, const Vector& psi) {
  return psi.head(static_cast<Eigen::Index>(view.latent_dim()));
}

Vector psi_theta(const LatentGaussianView& view, const Vector& psi) {
  return psi.tail(static_cast<Eigen::Index>(view.theta_dim()));
}

double log_joint(const LatentGaussianView& view, const Vector& theta, const Vector& eta, ParamScale scale) {
  check_dims(view, theta, eta);
  const Vector lin = view.linear_predictor(eta);
  if (!lin.allFinite()) throw InvalidArgument("log_joint: non-finite linear predictor");
  double value = view.log_likelihood(lin, theta) + view.log_latent_prior(theta, eta) + view.log_theta_prior(theta);
  if (scale == ParamScale::Original) value -= view.log_theta_jacobian(theta);
  return value;
}

double log_joint(const ModelSpec& m, const Vector& theta, const Vector& eta, ParamScale scale) {
  return log_joint(latent_gaussian_view(m), theta, eta, scale);
}

JointDerivs log_joint_derivs(const LatentGaussianView& view, const Vector& theta, const Vector& eta) {
  check_dims(view, theta, eta);
  const auto d = static_cast<Eigen::Index>(view.latent_dim());
  const auto k = static_cast<Eigen::Index>(view.theta_dim());
  JointDerivs out;
  out.gradient = Vector::Zero(d + k);
  out.hessian = Matrix::Zero(d + k, d + k);

  const Vector lin = view.linear_predictor(eta);
  Vector d1, d2;
  const double loglik = view.likelihood_derivs(lin, theta, d1, d2);
  const Matrix q = view.precision(theta);
  const Vector centered = eta - view.latent_mean;

  out.value = loglik + view.log_latent_prior(theta, eta) + view.log_theta_prior(theta);
  out.gradient.head(d) = view.design.transpose() * d1 - q * centered;
  out.hessian.topLeftCorner(d, d) = view.design.transpose() * d2.asDiagonal() * view.design - q;

  if (const auto* h = std::get_if<GammaPrecisionHyper>(&view.hyper)) {
    // Gaussian likelihood with precision e^theta and Gamma prior on it.
    const double tau = std::exp(theta[0]);
    const double ss = (view.y - lin).squaredNorm();
    const double n = static_cast<double>(view.n_obs());
    out.gradient[d] = 0.5 * n - 0.5 * tau * ss + h->shape - h->rate * tau;
    out.hessian(d, d) = -0.5 * tau * ss - h->rate * tau;
    const Vector cross = view.design.transpose() * d1;  // d/dtheta of tau * r = tau * r
    out.hessian.block(0, d, d, 1) = cross;
    out.hessian.block(d, 0, 1, d) = cross.transpose();
  } else if (const auto* w = std::get_if<WishartBlockHyper>(&view.hyper)) {
    const CholeskyDerivs c = cholesky_derivs(theta);
    const auto nf = static_cast<Eigen::Index>(w->n_fixed);
    const double groups = static_cast<double>(w->n_groups);
    const Matrix scale_inv = w->scale.inverse();
    // log-determinant terms: latent prior (groups * (t0 + t1)), Wishart
    // ((df - 3) * (t0 + t1)) and the Jacobian (3 t0 + 2 t1).
    out.gradient[d + 0] = groups + (w->df - 3.0) + 3.0;
    out.gradient[d + 1] = groups + (w->df - 3.0) + 2.0;
    for (int a = 0; a < 3; ++a) {
      out.gradient[d + a] -= 0.5 * (scale_inv * c.dp[a]).trace();
      for (int b = 0; b < 3; ++b) out.hessian(d + a, d + b) -= 0.5 * (scale_inv * c.d2p[a][b]).trace();
    }
    for (std::size_t j = 0; j < w->n_groups; ++j) {
      const Eigen::Index off = nf + 2 * static_cast<Eigen::Index>(j);
      const Vector u = centered.segment(off, 2);
      for (int a = 0; a < 3; ++a) {
        out.gradient[d + a] -= 0.5 * u.dot(c.dp[a] * u);
        const Vector cross = -(c.dp[a] * u);
        out.hessian.block(off, d + a, 2, 1) = cross;
        out.hessian.block(d + a, off, 1, 2) = cross.transpose();
        for (int b = 0; b < 3; ++b) out.hessian(d + a, d + b) -= 0.5 * u.dot(c.d2p[a][b] * u);
      }
    }
  }
  return out;
}

}  // namespace evidence::modelzoo
