#pragma once

#include "evidence/estimate.hpp"
#include "evidence/modelzoo/latent_view.hpp"

#include <optional>
#include <vector>

namespace evidence::inla {

using numkit::Matrix;
using numkit::Vector;

struct NewtonOptions {
  double tolerance = 1e-8;  // sup-norm of the gradient
  int max_iterations = 100;
};

// Normal approximation to eta | y, theta at the conditional mode.
struct GaussianApprox {
  Vector mode;
  Matrix precision;  // Q(theta) + A^T W A
  numkit::CholeskyFactor factor;
  double log_likelihood = 0.0;    // at the mode
  double log_latent_prior = 0.0;  // at the mode
  int iterations = 0;
};

// Newton with step halving; throws ConvergenceFailure (carrying the last
// iterate in its message) when the cap is reached.
GaussianApprox gaussian_approx(const modelzoo::LatentGaussianView& view, const Vector& theta,
                               const std::optional<Vector>& start = std::nullopt, const NewtonOptions& opts = {});

// log p(y, eta*, theta) - log pi_G(eta* | y, theta) on the internal theta scale.
double log_evidence_given_theta(const modelzoo::LatentGaussianView& view, const Vector& theta,
                                const std::optional<Vector>& start = std::nullopt);

struct ThetaMode {
  Vector theta;
  double value = 0.0;       // log p~(y | theta) + log p(theta) at the mode
  Matrix neg_hessian;       // finite-difference curvature
  Vector latent_mode;       // eta*(theta_hat), reused as a warm start
  int iterations = 0;
};

// Newton ascent on log p~(theta | y) with central finite differences.
ThetaMode find_theta_mode(const modelzoo::LatentGaussianView& view, double fd_step = 1e-4);

struct GridPoint {
  std::vector<int> z;  // integer coordinates, scaled by delta_z
  Vector theta;
  double log_density = 0.0;
};

struct ThetaGrid {
  ThetaMode mode;
  Matrix transform;  // theta = mode + transform * (delta_z * z)
  double delta_z = 0.75;
  double pi_z = 6.0;
  std::vector<GridPoint> points;  // lexicographic in z

  // log of sum_k exp(log_density_k) * delta_z^dim * |det transform|
  double log_integral() const;
};

ThetaGrid build_theta_grid(const modelzoo::LatentGaussianView& view, double delta_z, double pi_z,
                           std::size_t jobs = 1);

EvidenceEstimate inla_evidence(const modelzoo::LatentGaussianView& view, const InlaConfig& cfg = {},
                               std::size_t jobs = 1);

// Laplace approximation over psi = (eta, theta) on the internal scale.
struct LaplaceOptions {
  LaplaceCenter center = LaplaceCenter::PosteriorMode;
  std::size_t map_sweeps = 10000;
  std::uint64_t seed = 1;
  std::uint64_t stream = 0;
};

EvidenceEstimate laplace_evidence(const modelzoo::ModelSpec& m, const LaplaceOptions& opts = {});

// Posterior mode of the internal-scale log joint by damped Newton.
Vector joint_mode(const modelzoo::LatentGaussianView& view, const Vector& start_psi);

}  // namespace evidence::inla
