#pragma once

#include "evidence/modelzoo/kernels.hpp"
#include "evidence/modelzoo/latent_view.hpp"

#include <cstddef>
#include <string_view>
#include <vector>

namespace evidence::modelzoo {

struct SweepStats {
  std::size_t proposals = 0;
  std::size_t accepts = 0;
  double acceptance_rate() const {
    return proposals == 0 ? 1.0 : static_cast<double>(accepts) / static_cast<double>(proposals);
  }
};

// Proposal scales that depend only on the temperature; build once per rung
// and share across chains.
struct KernelTuning {
  double temperature = 1.0;
  Matrix proposal_lower;  // binary regressions: full beta; GLMM: fixed effects
};

// The power posterior p(y | psi)^t p(psi) over psi = (eta, theta) on the
// internal scale, with a transition kernel that leaves it invariant:
//   toy          exact draw
//   gausslinreg  tempered two-block Gibbs
//   probit/logit Gaussian random-walk MH, d proposals per sweep
//   glmm         MH-within-Gibbs (RW on beta, RW per subject, exact Wishart)
class TemperedTarget {
 public:
  explicit TemperedTarget(ModelSpec model);

  const ModelSpec& model() const { return model_; }
  const LatentGaussianView& view() const { return view_; }
  std::size_t dim() const { return view_.latent_dim() + view_.theta_dim(); }
  std::string_view kernel_name() const;

  double log_likelihood(const Vector& psi) const;
  double log_prior(const Vector& psi) const;
  Vector sample_prior(RngStream& rng) const;
  // A point in the bulk of the t = 1 posterior.
  Vector initial_state() const;

  KernelTuning tuning(double temperature) const;
  void sweep(Vector& psi, const KernelTuning& tuning, RngStream& rng, SweepStats* stats = nullptr) const;
  void sweep(Vector& psi, double temperature, RngStream& rng, SweepStats* stats = nullptr) const {
    sweep(psi, tuning(temperature), rng, stats);
  }

 private:
  void sweep_binary(Vector& psi, const KernelTuning& k, RngStream& rng, SweepStats* stats) const;
  void sweep_glmm(Vector& psi, const KernelTuning& k, RngStream& rng, SweepStats* stats) const;

  ModelSpec model_;
  LatentGaussianView view_;
  ModelKind kind_;
  // binary regressions: likelihood curvature at the posterior mode
  Matrix curvature_;
  Vector mode_;
  // glmm: rows per subject and a rough per-subject likelihood curvature
  std::vector<std::vector<Eigen::Index>> subject_rows_;
  std::vector<Matrix> subject_curvature_;
};

}  // namespace evidence::modelzoo
