#include "common.hpp"
#include "evidence/mc/estimators.hpp"
#include "evidence/modelzoo/tempered.hpp"

namespace evidence::mc {

EvidenceEstimate harmonic_mean(const ModelSpec& m, const EstimatorConfig& cfg, RngStream& rng) {
  validate(cfg);
  const Stopwatch clock;
  const modelzoo::TemperedTarget target(m);
  const auto tuning = target.tuning(1.0);
  modelzoo::SweepStats stats;
  numkit::Vector psi = target.initial_state();
  for (std::size_t s = 0; s < cfg.burn_in; ++s) target.sweep(psi, tuning, rng);
  std::vector<double> neg_loglik(cfg.iterations);
  for (std::size_t s = 0; s < cfg.iterations; ++s) {
    target.sweep(psi, tuning, rng, &stats);
    neg_loglik[s] = -target.log_likelihood(psi);
  }
  EvidenceEstimate e;
  e.estimator = "harmonic-mean";
  e.log_ml = -numkit::log_mean_exp(neg_loglik);
  e.mc_se = detail::log_mean_exp_se(neg_loglik, cfg.batches);
  e.n_iterations = cfg.iterations;
  e.diagnostics["acceptance_rate"] = stats.acceptance_rate();
  e.notes["kernel"] = std::string(target.kernel_name());
  e.wall_time = clock.seconds();
  check_estimate(e);
  return e;
}

}  // namespace evidence::mc
