#include "evidence/errors.hpp"
#include "evidence/inla/inla.hpp"
#include "evidence/numkit/special.hpp"

#include <cmath>
#include <sstream>

namespace evidence::inla {

GaussianApprox gaussian_approx(const modelzoo::LatentGaussianView& view, const Vector& theta,
                               const std::optional<Vector>& start, const NewtonOptions& opts) {
  const Matrix q = view.precision(theta);
  const Vector& mu = view.latent_mean;
  Vector eta = start ? *start : mu;
  if (eta.size() != mu.size()) throw InvalidArgument("gaussian_approx: start has the wrong dimension");

  const auto objective = [&](const Vector& e, double& loglik) {
    loglik = view.log_likelihood(view.linear_predictor(e), theta);
    const Vector r = e - mu;
    return loglik - 0.5 * r.dot(q * r);
  };

  Vector d1, d2;
  GaussianApprox out;
  double loglik = 0.0;
  double value = objective(eta, loglik);
  for (int iter = 0;; ++iter) {
    view.likelihood_derivs(view.linear_predictor(eta), theta, d1, d2);
    const Vector grad = view.design.transpose() * d1 - q * (eta - mu);
    Matrix h = q + view.design.transpose() * (-d2).asDiagonal() * view.design;
    h = numkit::symmetrize(h);
    out.factor = numkit::chol_logdet(h, "Gaussian approximation precision");
    const double gnorm = grad.lpNorm<Eigen::Infinity>();
    if (gnorm < opts.tolerance) {
      out.iterations = iter;
      out.precision = std::move(h);
      break;
    }
    if (iter >= opts.max_iterations) {
      std::ostringstream msg;
      msg << "gaussian_approx: no convergence after " << iter << " Newton steps (gradient " << gnorm
          << "); last iterate:";
      for (Eigen::Index i = 0; i < eta.size(); ++i) msg << ' ' << eta[i];
      throw ConvergenceFailure(msg.str());
    }
    const Vector step = out.factor.solve(grad);
    double scale = 1.0;
    bool moved = false;
    for (int halving = 0; halving < 50; ++halving, scale *= 0.5) {
      const Vector trial = eta + scale * step;
      double trial_ll = 0.0;
      double v = -std::numeric_limits<double>::infinity();
      try {
        v = objective(trial, trial_ll);
      } catch (const InvalidArgument&) {
      }
      if (std::isfinite(v) && v >= value - 1e-12 * std::abs(value)) {
        eta = trial;
        value = v;
        moved = true;
        break;
      }
    }
    if (!moved || (scale * step).lpNorm<Eigen::Infinity>() < 1e-14 * (1.0 + eta.lpNorm<Eigen::Infinity>())) {
      // at the floating-point resolution of the optimum
      view.likelihood_derivs(view.linear_predictor(eta), theta, d1, d2);
      out.precision = numkit::symmetrize(q + view.design.transpose() * (-d2).asDiagonal() * view.design);
      out.factor = numkit::chol_logdet(out.precision, "Gaussian approximation precision");
      out.iterations = iter + 1;
      break;
    }
  }
  out.mode = eta;
  out.log_likelihood = view.log_likelihood(view.linear_predictor(eta), theta);
  out.log_latent_prior = view.log_latent_prior(theta, eta);
  return out;
}

double log_evidence_given_theta(const modelzoo::LatentGaussianView& view, const Vector& theta,
                                const std::optional<Vector>& start) {
  const GaussianApprox g = gaussian_approx(view, theta, start);
  const double d = static_cast<double>(g.mode.size());
  return g.log_likelihood + g.log_latent_prior + view.log_theta_prior(theta) + 0.5 * d * numkit::kLogTwoPi -
         0.5 * g.factor.log_det;
}

}  // namespace evidence::inla
