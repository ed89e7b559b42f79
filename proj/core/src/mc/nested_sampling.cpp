#include "evidence/errors.hpp"
#include "evidence/mc/estimators.hpp"
#include "evidence/modelzoo/tempered.hpp"
#include "evidence/numkit/stats.hpp"

#include <algorithm>
#include <cmath>

namespace evidence::mc {

using numkit::Matrix;
using numkit::Vector;

namespace {

double log_add(double a, double b) {
  if (a == -std::numeric_limits<double>::infinity()) return b;
  if (b == -std::numeric_limits<double>::infinity()) return a;
  return std::max(a, b) + std::log1p(std::exp(-std::abs(a - b)));
}

// Lower Cholesky factor of the live-point covariance, jittered if singular.
Matrix live_scale(const std::vector<Vector>& live) {
  const auto d = live.front().size();
  Vector mean = Vector::Zero(d);
  for (const auto& x : live) mean += x;
  mean /= static_cast<double>(live.size());
  Matrix cov = Matrix::Zero(d, d);
  for (const auto& x : live) cov += (x - mean) * (x - mean).transpose();
  cov /= std::max<double>(1.0, static_cast<double>(live.size()) - 1.0);
  double jitter = 1e-12 * (1.0 + cov.diagonal().cwiseAbs().maxCoeff());
  for (int attempt = 0; attempt < 40; ++attempt, jitter *= 10.0) {
    try {
      return numkit::chol_logdet(cov + jitter * Matrix::Identity(d, d), "live covariance").lower;
    } catch (const NotPositiveDefinite&) {
    }
  }
  return Matrix::Identity(d, d);
}

}  // namespace

EvidenceEstimate nested_sampling_evidence(const ModelSpec& m, const EstimatorConfig& cfg, RngStream& rng) {
  validate(cfg);
  const Stopwatch clock;
  const modelzoo::TemperedTarget target(m);
  const auto& nc = cfg.nested;
  const std::size_t n_live = nc.n_live;
  const double n = static_cast<double>(n_live);

  std::vector<Vector> live(n_live);
  std::vector<double> live_l(n_live), live_prior(n_live);
  for (std::size_t i = 0; i < n_live; ++i) {
    live[i] = target.sample_prior(rng);
    live_l[i] = target.log_likelihood(live[i]);
    live_prior[i] = target.log_prior(live[i]);
  }

  const auto d = static_cast<double>(target.dim());
  const std::size_t refresh = std::max<std::size_t>(1, n_live / 10);
  Matrix scale_lower = live_scale(live);
  double step_size = 2.38 / std::sqrt(d);
  std::size_t proposals = 0, accepts = 0;

  // Skilling weights: X_k = exp(-k / n), w_k = (X_{k-1} - X_{k+1}) / 2
  const double log_half_width = std::log(0.5 * -std::expm1(-2.0 / n));
  double log_z = -std::numeric_limits<double>::infinity();
  std::vector<double> dead_l, dead_w;
  std::size_t k = 0;
  bool plateau = false;
  for (;;) {
    const auto [lo_it, hi_it] = std::minmax_element(live_l.begin(), live_l.end());
    const double l_max = *hi_it;
    const double log_x = -static_cast<double>(k) / n;
    // flat to rounding: the tail term below carries the remaining mass exactly
    if (l_max - *lo_it <= 1e-12 * std::max(1.0, std::abs(l_max))) {
      plateau = true;
      break;
    }
    if (k > 0 && l_max + log_x < log_z + std::log(nc.termination_ratio)) break;
    if (k >= nc.max_iterations) throw ConvergenceFailure("nested_sampling_evidence: iteration cap reached");
    ++k;

    const auto worst = static_cast<std::size_t>(lo_it - live_l.begin());
    const double l_star = live_l[worst];
    const double log_w = -static_cast<double>(k - 1) / n + log_half_width;
    log_z = log_add(log_z, l_star + log_w);
    dead_l.push_back(l_star);
    dead_w.push_back(log_w);

    // replace the worst point by a constrained walk from another live point
    if (n_live > 1) {
      std::size_t src = worst;
      while (src == worst) src = static_cast<std::size_t>(rng.uniform_index(n_live));
      Vector x = live[src];
      double lx = live_l[src], px = live_prior[src];
      std::size_t moved = 0;
      for (int attempt = 0; moved == 0; ++attempt) {
        if (attempt >= 20) {
          throw ConvergenceFailure("nested_sampling_evidence: replacement walk made no move in " +
                                   std::to_string(20 * nc.mcmc_steps) + " proposals at iteration " +
                                   std::to_string(k));
        }
        for (std::size_t s = 0; s < nc.mcmc_steps; ++s) {
          Vector z(x.size());
          for (Eigen::Index i = 0; i < z.size(); ++i) z[i] = rng.normal();
          const Vector y = x + step_size * (scale_lower * z);
          ++proposals;
          double py = -std::numeric_limits<double>::infinity();
          try {
            py = target.log_prior(y);
          } catch (const Error&) {
          }
          if (!std::isfinite(py) || std::log(rng.uniform()) >= py - px) continue;
          const double ly = target.log_likelihood(y);
          if (!(ly > l_star)) continue;
          x = y;
          lx = ly;
          px = py;
          ++moved;
        }
        // steer the walk towards about half of the proposals moving
        step_size *= moved * 2 > nc.mcmc_steps ? 1.1 : 1.0 / 1.1;
        step_size = std::clamp(step_size, 1e-4, 10.0);
      }
      accepts += moved;
      live[worst] = x;
      live_l[worst] = lx;
      live_prior[worst] = px;
    } else {
      throw InvalidArgument("nested_sampling_evidence: need at least two live points");
    }
    if (k % refresh == 0) scale_lower = live_scale(live);
  }

  // remaining prior mass shared by the live points
  const double log_x_final = -static_cast<double>(k) / n;
  const double tail = numkit::log_mean_exp(live_l) + log_x_final;
  log_z = log_add(log_z, tail);

  double info = 0.0;
  for (std::size_t i = 0; i < dead_l.size(); ++i) {
    const double p = std::exp(dead_l[i] + dead_w[i] - log_z);
    info += p * (dead_l[i] - log_z);
  }
  for (double l : live_l) {
    const double p = std::exp(l + log_x_final - std::log(n) - log_z);
    info += p * (l - log_z);
  }
  info = std::max(info, 0.0);

  EvidenceEstimate e;
  e.estimator = "nested-sampling";
  e.log_ml = log_z;
  e.mc_se = std::sqrt(info / n);
  e.n_iterations = k;
  e.diagnostics["information"] = info;
  e.diagnostics["live_points"] = n;
  e.diagnostics["walk_steps"] = static_cast<double>(nc.mcmc_steps);
  e.diagnostics["acceptance_rate"] = proposals == 0 ? 1.0 : static_cast<double>(accepts) / static_cast<double>(proposals);
  e.diagnostics["plateau_stop"] = plateau ? 1.0 : 0.0;
  e.wall_time = clock.seconds();
  check_estimate(e);
  return e;
}

}  // namespace evidence::mc
