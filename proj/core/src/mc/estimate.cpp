#include "evidence/estimate.hpp"

#include "evidence/errors.hpp"

#include <cmath>

namespace evidence {

void check_estimate(const EvidenceEstimate& e) {
  if (!std::isfinite(e.log_ml)) throw InvalidArgument(e.estimator + ": log marginal likelihood is not finite");
  if (e.mc_se && !(*e.mc_se >= 0.0)) throw InvalidArgument(e.estimator + ": negative or NaN Monte Carlo error");
}

void validate(const EstimatorConfig& c) {
  const auto positive = [](std::size_t v, const char* name) {
    if (v == 0) throw InvalidArgument(std::string("estimator config: ") + name + " must be at least 1");
  };
  positive(c.iterations, "iterations");
  positive(c.replications, "replications");
  positive(c.batches, "batches");
  positive(c.jobs, "jobs");
  positive(c.power.n_steps, "power.n_steps");
  positive(c.power.samples_per_step, "power.samples_per_step");
  positive(c.ais.n_temperatures, "ais.n_temperatures");
  positive(c.ais.n_particles, "ais.n_particles");
  positive(c.ais.sweeps_per_temperature, "ais.sweeps_per_temperature");
  positive(c.nested.n_live, "nested.n_live");
  positive(c.nested.mcmc_steps, "nested.mcmc_steps");
  if (!(c.power.exponent > 0.0)) throw InvalidArgument("estimator config: power.exponent must be positive");
  if (!(c.ais.exponent > 0.0)) throw InvalidArgument("estimator config: ais.exponent must be positive");
  if (!(c.nested.termination_ratio > 0.0 && c.nested.termination_ratio < 1.0)) {
    throw InvalidArgument("estimator config: nested.termination_ratio must lie in (0, 1)");
  }
  if (!(c.inla.delta_z > 0.0) || !(c.inla.pi_z > 0.0)) {
    throw InvalidArgument("estimator config: delta_z and pi_z must be positive");
  }
}

}  // namespace evidence
