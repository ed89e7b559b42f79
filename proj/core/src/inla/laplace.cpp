#include "evidence/errors.hpp"
#include "evidence/inla/inla.hpp"
#include "evidence/modelzoo/tempered.hpp"
#include "evidence/numkit/special.hpp"

#include <cmath>

namespace evidence::inla {

using modelzoo::join_psi;
using modelzoo::psi_latent;
using modelzoo::psi_theta;

namespace {

modelzoo::JointDerivs derivs_at(const modelzoo::LatentGaussianView& view, const Vector& psi) {
  return modelzoo::log_joint_derivs(view, psi_theta(view, psi), psi_latent(view, psi));
}

double value_at(const modelzoo::LatentGaussianView& view, const Vector& psi) {
  try {
    return modelzoo::log_joint(view, psi_theta(view, psi), psi_latent(view, psi), modelzoo::ParamScale::Internal);
  } catch (const InvalidArgument&) {
    return -std::numeric_limits<double>::infinity();
  }
}

}  // namespace

Vector joint_mode(const modelzoo::LatentGaussianView& view, const Vector& start_psi) {
  Vector psi = start_psi;
  const auto k = psi.size();
  double value = value_at(view, psi);
  if (!std::isfinite(value)) throw InvalidArgument("joint_mode: log joint not finite at the start point");
  for (int iter = 0; iter < 200; ++iter) {
    const auto d = derivs_at(view, psi);
    if (d.gradient.lpNorm<Eigen::Infinity>() < 1e-9) return psi;
    const Matrix neg = numkit::symmetrize(-d.hessian);
    double lambda = 0.0;
    numkit::CholeskyFactor f;
    for (;;) {
      try {
        f = numkit::chol_logdet(neg + lambda * Matrix::Identity(k, k), "joint curvature");
        break;
      } catch (const NotPositiveDefinite&) {
        lambda = lambda == 0.0 ? 1e-3 * (1.0 + neg.diagonal().cwiseAbs().maxCoeff()) : 10.0 * lambda;
      }
    }
    const Vector step = f.solve(d.gradient);
    if (lambda == 0.0 && d.gradient.dot(step) < 1e-20) return psi;
    double scale = 1.0;
    bool moved = false;
    for (int halving = 0; halving < 50; ++halving, scale *= 0.5) {
      const Vector trial = psi + scale * step;
      const double v = value_at(view, trial);
      if (std::isfinite(v) && v >= value) {
        moved = v > value || scale == 1.0;
        psi = trial;
        value = v;
        break;
      }
    }
    if (!moved) return psi;
  }
  throw ConvergenceFailure("joint_mode: no convergence after 200 Newton steps");
}

EvidenceEstimate laplace_evidence(const modelzoo::ModelSpec& m, const LaplaceOptions& opts) {
  const Stopwatch clock;
  const auto view = modelzoo::latent_gaussian_view(m);
  EvidenceEstimate e;
  Vector center;
  if (opts.center == LaplaceCenter::PosteriorMode) {
    e.estimator = "laplace";
    const Vector theta0 = view.initial_theta();
    const Vector eta0 = gaussian_approx(view, theta0).mode;
    center = joint_mode(view, join_psi(eta0, theta0));
  } else {
    e.estimator = "laplace-map";
    if (opts.map_sweeps == 0) throw InvalidArgument("laplace_evidence: map_sweeps must be positive");
    const modelzoo::TemperedTarget target(m);
    numkit::RngStream rng(opts.seed, opts.stream);
    Vector psi = target.initial_state();
    const auto tuning = target.tuning(1.0);
    center = psi;
    double best = target.log_likelihood(psi) + target.log_prior(psi);
    for (std::size_t s = 0; s < opts.map_sweeps; ++s) {
      target.sweep(psi, tuning, rng);
      const double v = target.log_likelihood(psi) + target.log_prior(psi);
      if (v > best) {
        best = v;
        center = psi;
      }
    }
    e.n_iterations = opts.map_sweeps;
    e.notes["center"] = "highest log posterior among sampled draws";
  }
  const auto d = derivs_at(view, center);
  const auto f = numkit::chol_logdet(numkit::symmetrize(-d.hessian), "negative Hessian at the Laplace center");
  const double k = static_cast<double>(center.size());
  e.log_ml = d.value + 0.5 * k * numkit::kLogTwoPi - 0.5 * f.log_det;
  e.diagnostics["dim"] = k;
  e.diagnostics["log_joint_at_center"] = d.value;
  e.diagnostics["gradient_sup_norm"] = d.gradient.lpNorm<Eigen::Infinity>();
  e.wall_time = clock.seconds();
  check_estimate(e);
  return e;
}

}  // namespace evidence::inla
