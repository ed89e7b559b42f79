#pragma once

#include "evidence/errors.hpp"
#include "evidence/estimate.hpp"
#include "evidence/modelzoo/model_spec.hpp"

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace evidence::bench {

// A scenario names something that does not exist (model, dataset, column,
// estimator). Maps to exit status 2.
class ReferenceError : public Error {
 public:
  using Error::Error;
};

struct Scenario {
  std::string id;
  std::string model;    // toy | gausslinreg | probit | logit | glmm
  std::string dataset;  // uscrime | pima | epilepsy | synthetic-bernoulli | synthetic-linreg | none
  std::string response;
  std::vector<std::string> covariates;
  bool standardize = false;
  std::size_t synthetic_n = 0;
  std::size_t synthetic_p = 0;
  std::uint64_t data_seed = 1;
  // toy payload
  double y = 2.0;
  double sigma0 = 1.0;
  double sigma1 = 1.0;
  // prior hyperparameters
  double prior_mean = 0.0;
  double prior_var = 1.0;
  double gamma_shape = 1.0;
  double gamma_rate = 1.0;
  std::string estimator;
  EstimatorConfig config;
  // presentation
  std::string table;
  std::string row;
  std::string column;
  std::string group;
};

struct Suite {
  std::vector<Scenario> scenarios;  // in file order
  std::filesystem::path data_dir;
};

// [defaults] supplies values for every other table; each other table is one
// scenario whose id is the table name. `seed_override` replaces every seed.
Suite load_suite(const std::filesystem::path& config, std::optional<std::uint64_t> seed_override = std::nullopt);
Suite parse_suite(std::string_view toml_text, const std::filesystem::path& base_dir,
                  std::optional<std::uint64_t> seed_override = std::nullopt);

// Builds the model a scenario refers to; throws ReferenceError on unknown names.
modelzoo::ModelSpec build_model(const Scenario& s, const std::filesystem::path& data_dir);

inline const std::vector<std::string>& known_estimators() {
  static const std::vector<std::string> names{
      "exact",  "quadrature",      "inla",   "inla-eb",        "inla-grid",       "laplace",
      "laplace-map", "harmonic-mean", "chib", "chib-jeliazkov", "power-posterior", "ais",
      "nested-sampling"};
  return names;
}

// Runs one replication; the stream id is the replication index.
EvidenceEstimate run_estimator(const Scenario& s, const modelzoo::ModelSpec& m, std::size_t replication);

struct Replication {
  std::size_t index = 0;
  std::optional<EvidenceEstimate> estimate;
  std::string error;  // set when the estimator threw
};

struct Summary {
  std::size_t ok = 0;
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double max = 0.0;
};

struct ScenarioResult {
  Scenario scenario;
  std::vector<Replication> replications;
  Summary summary;
  double wall_time = 0.0;
};

Summary summarize(const std::vector<Replication>& reps);

// Executes every (scenario, replication) on `jobs` workers and writes
// results.jsonl, summary.csv and timings.csv into out_dir.
std::vector<ScenarioResult> run_suite(const Suite& suite, std::size_t jobs, const std::filesystem::path& out_dir);
bool any_failed(const std::vector<ScenarioResult>& results);

// One parsed line of results.jsonl.
struct ResultRow {
  std::string scenario;
  std::size_t replication = 0;
  std::string model;
  std::string estimator;
  std::string table, row, column, group;
  bool ok = false;
  double log_ml = 0.0;
  std::optional<double> mc_se;
  std::size_t iterations = 0;
  double sigma0 = 0.0, sigma1 = 0.0, y = 0.0;
};

std::string result_json_line(const ScenarioResult& r, const Replication& rep);
std::vector<ResultRow> read_results(const std::filesystem::path& results_jsonl);

// Posterior model probabilities from log evidences and prior weights, and
// the matrix of log Bayes factors log m_i - log m_j.
struct ModelPosteriors {
  std::vector<double> probabilities;
  std::vector<std::vector<double>> log_bayes_factors;
};
ModelPosteriors model_posteriors(std::span<const double> log_ml, std::span<const double> prior);

// min{1, exp(proposal - current)} of a model-space Metropolis-Hastings move.
double mh_model_acceptance(double logml_cur, double logml_prop, double log_prior_cur, double log_prior_prop,
                           double log_q_fwd, double log_q_rev);

struct TableOutput {
  std::string markdown;
  std::string csv;
  std::size_t missing_cells = 0;
};

inline const std::vector<std::string>& known_layouts() {
  static const std::vector<std::string> names{"table1", "table2", "table3", "table4", "figure2", "glmm"};
  return names;
}

TableOutput emit_table(const std::vector<ResultRow>& results, const std::string& layout);

}  // namespace evidence::bench
