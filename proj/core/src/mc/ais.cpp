#include "evidence/mc/estimators.hpp"
#include "evidence/modelzoo/tempered.hpp"
#include "evidence/numkit/parallel.hpp"
#include "evidence/numkit/stats.hpp"

#include <cmath>

namespace evidence::mc {

EvidenceEstimate ais_evidence(const ModelSpec& m, const EstimatorConfig& cfg, RngStream& rng) {
  validate(cfg);
  const Stopwatch clock;
  const modelzoo::TemperedTarget target(m);
  const auto& ac = cfg.ais;
  const std::vector<double> ladder = power_ladder(ac.n_temperatures, ac.exponent);
  std::vector<modelzoo::KernelTuning> tunings;
  for (double t : ladder) tunings.push_back(target.tuning(t));

  std::vector<double> log_w(ac.n_particles, 0.0);
  std::vector<modelzoo::SweepStats> stats(ac.n_particles);
  numkit::parallel_for(ac.n_particles, cfg.jobs, [&](std::size_t p) {
    RngStream stream = rng.substream(p);
    numkit::Vector psi = target.sample_prior(stream);
    double w = 0.0;
    for (std::size_t k = 1; k < ladder.size(); ++k) {
      w += (ladder[k] - ladder[k - 1]) * target.log_likelihood(psi);
      if (k + 1 < ladder.size()) {
        for (std::size_t s = 0; s < ac.sweeps_per_temperature; ++s) target.sweep(psi, tunings[k], stream, &stats[p]);
      }
    }
    log_w[p] = w;
  });

  const double log_mean = numkit::log_mean_exp(log_w);
  double s1 = 0.0, s2 = 0.0;
  for (double w : log_w) {
    const double r = std::exp(w - log_mean);
    s1 += r;
    s2 += r * r;
  }
  const double n = static_cast<double>(ac.n_particles);
  const double ess = s1 * s1 / s2;
  // relative standard error of the mean weight
  const double rel_var = n > 1 ? (s2 / n - 1.0) * n / (n - 1.0) : 0.0;

  modelzoo::SweepStats total;
  for (const auto& s : stats) {
    total.proposals += s.proposals;
    total.accepts += s.accepts;
  }
  EvidenceEstimate e;
  e.estimator = "ais";
  e.log_ml = log_mean;
  e.mc_se = std::sqrt(std::max(rel_var, 0.0) / n);
  e.n_iterations = ac.n_particles * ac.n_temperatures * ac.sweeps_per_temperature;
  e.diagnostics["ess"] = ess;
  e.diagnostics["low_ess"] = ess < 10.0 ? 1.0 : 0.0;
  e.diagnostics["temperatures"] = static_cast<double>(ac.n_temperatures);
  e.diagnostics["particles"] = n;
  e.diagnostics["acceptance_rate"] = total.acceptance_rate();
  if (ess < 10.0) e.notes["warning"] = "effective sample size below 10";
  e.notes["kernel"] = std::string(target.kernel_name());
  e.wall_time = clock.seconds();
  check_estimate(e);
  return e;
}

}  // namespace evidence::mc
