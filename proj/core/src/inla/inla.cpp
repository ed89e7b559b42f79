#include "evidence/errors.hpp"
#include "evidence/inla/inla.hpp"
#include "evidence/numkit/parallel.hpp"
#include "evidence/numkit/special.hpp"
#include "evidence/numkit/stats.hpp"

#include <algorithm>
#include <cmath>
#include <set>

namespace evidence::inla {

namespace {

struct FdDerivs {
  double value = 0.0;
  Vector gradient;
  Matrix hessian;
};

FdDerivs fd_derivs(const std::function<double(const Vector&)>& g, const Vector& x, double h) {
  const auto k = x.size();
  FdDerivs d;
  d.value = g(x);
  d.gradient = Vector::Zero(k);
  d.hessian = Matrix::Zero(k, k);
  const auto shifted = [&](Eigen::Index i, double si, Eigen::Index j, double sj) {
    Vector y = x;
    y[i] += si * h;
    if (j >= 0) y[j] += sj * h;
    return g(y);
  };
  for (Eigen::Index i = 0; i < k; ++i) {
    const double fp = shifted(i, 1, -1, 0), fm = shifted(i, -1, -1, 0);
    d.gradient[i] = (fp - fm) / (2 * h);
    d.hessian(i, i) = (fp - 2 * d.value + fm) / (h * h);
    for (Eigen::Index j = 0; j < i; ++j) {
      const double v = (shifted(i, 1, j, 1) - shifted(i, 1, j, -1) - shifted(i, -1, j, 1) + shifted(i, -1, j, -1)) /
                       (4 * h * h);
      d.hessian(i, j) = d.hessian(j, i) = v;
    }
  }
  return d;
}

}  // namespace

ThetaMode find_theta_mode(const modelzoo::LatentGaussianView& view, double fd_step) {
  ThetaMode out;
  const auto k = static_cast<Eigen::Index>(view.theta_dim());
  Vector theta = view.initial_theta();
  Vector warm = gaussian_approx(view, theta).mode;
  const auto g = [&](const Vector& t) { return log_evidence_given_theta(view, t, warm); };
  if (k == 0) {
    out.theta = theta;
    out.value = g(theta);
    out.neg_hessian = Matrix(0, 0);
    out.latent_mode = warm;
    return out;
  }

  FdDerivs d;
  int iter = 0;
  for (;; ++iter) {
    d = fd_derivs(g, theta, fd_step);
    Matrix neg = numkit::symmetrize(-d.hessian);
    // Levenberg shift when the curvature is not yet negative definite
    double lambda = 0.0;
    numkit::CholeskyFactor f;
    for (;;) {
      try {
        f = numkit::chol_logdet(neg + lambda * Matrix::Identity(k, k), "theta curvature");
        break;
      } catch (const NotPositiveDefinite&) {
        lambda = lambda == 0.0 ? 1e-3 * (1.0 + neg.diagonal().cwiseAbs().maxCoeff()) : 10.0 * lambda;
      }
    }
    Vector step = f.solve(d.gradient);
    const double decrement = d.gradient.dot(step);
    if (lambda == 0.0 && decrement < 1e-10) break;
    if (iter >= 100) throw ConvergenceFailure("find_theta_mode: no convergence after 100 Newton steps");
    const double norm = step.lpNorm<Eigen::Infinity>();
    if (norm > 2.0) step *= 2.0 / norm;
    double scale = 1.0;
    bool moved = false;
    for (int halving = 0; halving < 30; ++halving, scale *= 0.5) {
      const Vector trial = theta + scale * step;
      double v = -std::numeric_limits<double>::infinity();
      try {
        v = g(trial);
      } catch (const Error&) {
      }
      if (std::isfinite(v) && v > d.value) {
        theta = trial;
        moved = true;
        break;
      }
    }
    if (!moved) break;
    warm = gaussian_approx(view, theta, warm).mode;
  }
  out.theta = theta;
  out.value = d.value;
  out.neg_hessian = numkit::symmetrize(-d.hessian);
  out.latent_mode = warm;
  out.iterations = iter;
  return out;
}

double ThetaGrid::log_integral() const {
  if (points.empty()) throw ConvergenceFailure("ThetaGrid: empty grid");
  std::vector<double> values;
  values.reserve(points.size());
  for (const auto& p : points) values.push_back(p.log_density);
  const double k = static_cast<double>(mode.theta.size());
  double log_det = 0.0;
  for (Eigen::Index i = 0; i < transform.rows(); ++i) log_det += std::log(std::abs(transform(i, i)));
  return numkit::log_sum_exp(values) + k * std::log(delta_z) + log_det;
}

ThetaGrid build_theta_grid(const modelzoo::LatentGaussianView& view, double delta_z, double pi_z, std::size_t jobs) {
  if (!(delta_z > 0.0) || !(pi_z > 0.0)) throw InvalidArgument("build_theta_grid: delta_z and pi_z must be positive");
  ThetaGrid grid;
  grid.delta_z = delta_z;
  grid.pi_z = pi_z;
  grid.mode = find_theta_mode(view);
  const auto k = static_cast<Eigen::Index>(grid.mode.theta.size());
  if (k == 0) {
    grid.transform = Matrix(0, 0);
    grid.points.push_back({{}, grid.mode.theta, grid.mode.value});
    return grid;
  }
  if (k > 3) throw InvalidArgument("build_theta_grid: at most three hyperparameters");
  const auto neg = numkit::chol_logdet(grid.mode.neg_hessian, "theta mode curvature");
  grid.transform = numkit::chol_logdet(numkit::symmetrize(neg.inverse()), "theta covariance").lower;

  const Vector& warm = grid.mode.latent_mode;
  const auto theta_at = [&](const std::vector<int>& z) {
    Vector s(k);
    for (Eigen::Index i = 0; i < k; ++i) s[i] = delta_z * z[static_cast<std::size_t>(i)];
    return Vector(grid.mode.theta + grid.transform * s);
  };
  const auto density = [&](const Vector& theta) {
    try {
      return log_evidence_given_theta(view, theta, warm);
    } catch (const Error&) {
      return -std::numeric_limits<double>::infinity();
    }
  };
  const double top = grid.mode.value;
  constexpr int kMaxSteps = 60;

  // extent along each signed axis
  std::vector<int> lo(static_cast<std::size_t>(k)), hi(static_cast<std::size_t>(k));
  for (Eigen::Index i = 0; i < k; ++i) {
    for (int sign : {-1, 1}) {
      int j = 0;
      while (j < kMaxSteps) {
        std::vector<int> z(static_cast<std::size_t>(k), 0);
        z[static_cast<std::size_t>(i)] = sign * (j + 1);
        if (top - density(theta_at(z)) > pi_z) break;
        ++j;
      }
      (sign < 0 ? lo : hi)[static_cast<std::size_t>(i)] = sign * j;
    }
  }

  // flood fill inside the box, one breadth-first layer at a time
  std::set<std::vector<int>> seen;
  std::vector<std::vector<int>> frontier{std::vector<int>(static_cast<std::size_t>(k), 0)};
  seen.insert(frontier.front());
  while (!frontier.empty()) {
    std::vector<double> values(frontier.size());
    numkit::parallel_for(frontier.size(), jobs, [&](std::size_t n) { values[n] = density(theta_at(frontier[n])); });
    std::vector<std::vector<int>> next;
    for (std::size_t n = 0; n < frontier.size(); ++n) {
      if (!(top - values[n] <= pi_z)) continue;
      grid.points.push_back({frontier[n], theta_at(frontier[n]), values[n]});
      for (Eigen::Index i = 0; i < k; ++i) {
        for (int sign : {-1, 1}) {
          auto z = frontier[n];
          auto& c = z[static_cast<std::size_t>(i)];
          c += sign;
          if (c < lo[static_cast<std::size_t>(i)] || c > hi[static_cast<std::size_t>(i)]) continue;
          if (seen.insert(z).second) next.push_back(std::move(z));
        }
      }
    }
    std::sort(next.begin(), next.end());
    frontier = std::move(next);
  }
  std::sort(grid.points.begin(), grid.points.end(), [](const GridPoint& a, const GridPoint& b) { return a.z < b.z; });
  return grid;
}

EvidenceEstimate inla_evidence(const modelzoo::LatentGaussianView& view, const InlaConfig& cfg, std::size_t jobs) {
  const Stopwatch clock;
  EvidenceEstimate e;
  const auto k = view.theta_dim();
  if (cfg.strategy == InlaStrategy::EmpiricalBayes) {
    e.estimator = "inla-eb";
    const ThetaMode mode = find_theta_mode(view);
    e.log_ml = mode.value;
    if (k > 0) {
      const auto f = numkit::chol_logdet(mode.neg_hessian, "theta mode curvature");
      e.log_ml += 0.5 * static_cast<double>(k) * numkit::kLogTwoPi - 0.5 * f.log_det;
    }
    for (std::size_t i = 0; i < k; ++i) e.diagnostics["theta_hat_" + std::to_string(i)] = mode.theta[static_cast<Eigen::Index>(i)];
    e.diagnostics["theta_newton_iterations"] = mode.iterations;
    e.n_iterations = static_cast<std::size_t>(mode.iterations);
  } else {
    e.estimator = "inla-grid";
    const ThetaGrid grid = build_theta_grid(view, cfg.delta_z, cfg.pi_z, jobs);
    e.log_ml = k == 0 ? grid.mode.value : grid.log_integral();
    for (std::size_t i = 0; i < k; ++i) e.diagnostics["theta_hat_" + std::to_string(i)] = grid.mode.theta[static_cast<Eigen::Index>(i)];
    e.diagnostics["grid_points"] = static_cast<double>(grid.points.size());
    e.diagnostics["delta_z"] = cfg.delta_z;
    e.diagnostics["pi_z"] = cfg.pi_z;
    e.n_iterations = grid.points.size();
    for (const auto& p : grid.points) e.trace.push_back(p.log_density);
  }
  e.wall_time = clock.seconds();
  check_estimate(e);
  return e;
}

}  // namespace evidence::inla
