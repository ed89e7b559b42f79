#pragma once

#include "evidence/estimate.hpp"
#include "evidence/modelzoo/model_spec.hpp"
#include "evidence/numkit/rng.hpp"

namespace evidence::mc {

using modelzoo::ModelSpec;
using numkit::RngStream;

// Posterior draws come from the exact sampler for the toy model and from the
// model's t = 1 kernel otherwise.
EvidenceEstimate harmonic_mean(const ModelSpec& m, const EstimatorConfig& cfg, RngStream& rng);

// Gibbs output with a Rao-Blackwellised beta ordinate and the exact Gamma
// ordinate for the precision.
EvidenceEstimate chib_evidence_gausslinreg(const modelzoo::GaussLinReg& m, const EstimatorConfig& cfg, RngStream& rng);

// Albert-Chib output; the beta ordinate is averaged over latent draws.
EvidenceEstimate chib_evidence_probit(const modelzoo::ProbitReg& m, const EstimatorConfig& cfg, RngStream& rng);

// Metropolis-Hastings ordinate identity for models without hyperparameters
// (logit, probit, toy); random-walk proposal from the curvature at the mode.
EvidenceEstimate chib_jeliazkov_evidence(const ModelSpec& m, const EstimatorConfig& cfg, RngStream& rng);

// Thermodynamic integration over t_i = (i / n)^c with the trapezoid rule.
EvidenceEstimate power_posterior_evidence(const ModelSpec& m, const EstimatorConfig& cfg, RngStream& rng);

// Particles annealed from the prior through (k / K)^c, one stream each.
EvidenceEstimate ais_evidence(const ModelSpec& m, const EstimatorConfig& cfg, RngStream& rng);

// Skilling's nested sampling with constrained random-walk replacement.
EvidenceEstimate nested_sampling_evidence(const ModelSpec& m, const EstimatorConfig& cfg, RngStream& rng);

// Temperature ladder (i / n)^c for i = 0..n.
std::vector<double> power_ladder(std::size_t n, double exponent);

}  // namespace evidence::mc
