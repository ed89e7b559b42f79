#include "evidence/bench/bench.hpp"
#include "evidence/numkit/stats.hpp"

#include <cmath>

namespace evidence::bench {

ModelPosteriors model_posteriors(std::span<const double> log_ml, std::span<const double> prior) {
  if (log_ml.size() != prior.size()) throw InvalidArgument("model_posteriors: evidence and prior lists differ in length");
  if (log_ml.empty()) throw InvalidArgument("model_posteriors: no models");
  std::vector<double> joint(log_ml.size());
  for (std::size_t i = 0; i < log_ml.size(); ++i) {
    if (!(prior[i] > 0.0)) throw InvalidArgument("model_posteriors: prior weights must be positive");
    joint[i] = log_ml[i] + std::log(prior[i]);
  }
  const double norm = numkit::log_sum_exp(joint);
  ModelPosteriors out;
  out.probabilities.resize(joint.size());
  for (std::size_t i = 0; i < joint.size(); ++i) out.probabilities[i] = std::exp(joint[i] - norm);
  out.log_bayes_factors.assign(joint.size(), std::vector<double>(joint.size(), 0.0));
  for (std::size_t i = 0; i < joint.size(); ++i) {
    for (std::size_t j = 0; j < joint.size(); ++j) out.log_bayes_factors[i][j] = log_ml[i] - log_ml[j];
  }
  return out;
}

double mh_model_acceptance(double logml_cur, double logml_prop, double log_prior_cur, double log_prior_prop,
                           double log_q_fwd, double log_q_rev) {
  const double log_ratio = (logml_prop + log_prior_prop + log_q_rev) - (logml_cur + log_prior_cur + log_q_fwd);
  if (std::isnan(log_ratio)) throw InvalidArgument("mh_model_acceptance: inputs must be finite");
  return log_ratio >= 0.0 ? 1.0 : std::exp(log_ratio);
}

}  // namespace evidence::bench
