#include "evidence/bench/bench.hpp"
#include "evidence/dataio/dataset.hpp"
#include "evidence/inla/inla.hpp"
#include "evidence/mc/estimators.hpp"
#include "evidence/modelzoo/latent_view.hpp"
#include "evidence/oracles/oracles.hpp"

#include <toml.hpp>

#include <algorithm>
#include <fstream>
#include <set>
#include <sstream>

#ifndef EVIDENCE_DEFAULT_DATA_DIR
#define EVIDENCE_DEFAULT_DATA_DIR "data"
#endif

namespace evidence::bench {

namespace {

const std::set<std::string> kScenarioKeys{
    "model",        "dataset",       "response",        "covariates",  "standardize", "n",
    "p",            "data_seed",     "y",               "sigma0",      "sigma1",      "prior_mean",
    "prior_var",    "gamma_shape",   "gamma_rate",      "estimator",   "iterations",  "burn_in",
    "replications", "seed",          "batches",         "pp_steps",    "pp_exponent", "pp_samples",
    "pp_burn_in",   "ais_temperatures", "ais_particles", "ais_exponent", "ais_sweeps", "ns_live",
    "ns_ratio",     "ns_steps",      "delta_z",         "pi_z",        "ordinate",    "map_sweeps",
    "table",        "row",           "column",          "group"};

class Lookup {
 public:
  Lookup(const toml::table& scenario, const toml::table* defaults, std::string id)
      : scenario_(scenario), defaults_(defaults), id_(std::move(id)) {}

  const toml::node* find(std::string_view key) const {
    if (const auto* n = scenario_.get(key)) return n;
    if (defaults_ != nullptr) return defaults_->get(key);
    return nullptr;
  }

  template <class T>
  T get(std::string_view key, T fallback) const {
    const toml::node* n = find(key);
    if (n == nullptr) return fallback;
    if constexpr (std::is_same_v<T, std::size_t> || std::is_same_v<T, std::uint64_t>) {
      const auto v = n->value<std::int64_t>();
      if (!v || *v < 0) fail(key, "a non-negative integer");
      return static_cast<T>(*v);
    } else if constexpr (std::is_same_v<T, std::string>) {
      const auto v = n->value<std::string>();
      if (!v) fail(key, "a string");
      return *v;
    } else {
      const auto v = n->value<T>();
      if (!v) fail(key, "a number or boolean of the right type");
      return *v;
    }
  }

  std::vector<std::string> strings(std::string_view key) const {
    const toml::node* n = find(key);
    std::vector<std::string> out;
    if (n == nullptr) return out;
    const auto* arr = n->as_array();
    if (arr == nullptr) fail(key, "an array of strings");
    for (const auto& el : *arr) {
      const auto v = el.value<std::string>();
      if (!v) fail(key, "an array of strings");
      out.push_back(*v);
    }
    return out;
  }

 private:
  [[noreturn]] void fail(std::string_view key, const char* what) const {
    throw ReferenceError("scenario '" + id_ + "': key '" + std::string(key) + "' must be " + what);
  }
  const toml::table& scenario_;
  const toml::table* defaults_;
  std::string id_;
};

void check_keys(const toml::table& t, const std::string& where, bool defaults) {
  for (const auto& [key, node] : t) {
    const std::string k(key.str());
    if (defaults && k == "data_dir") continue;
    if (!kScenarioKeys.contains(k)) throw ReferenceError(where + ": unknown key '" + k + "'");
  }
}

Scenario read_scenario(const std::string& id, const Lookup& l) {
  Scenario s;
  s.id = id;
  s.model = l.get<std::string>("model", "");
  s.dataset = l.get<std::string>("dataset", s.model == "toy" ? "none" : "");
  s.response = l.get<std::string>("response", s.dataset == "pima" ? "diabetes" : "y");
  s.covariates = l.strings("covariates");
  s.standardize = l.get<bool>("standardize", false);
  s.synthetic_n = l.get<std::size_t>("n", 0);
  s.synthetic_p = l.get<std::size_t>("p", 0);
  s.data_seed = l.get<std::uint64_t>("data_seed", 1);
  s.y = l.get<double>("y", s.y);
  s.sigma0 = l.get<double>("sigma0", s.sigma0);
  s.sigma1 = l.get<double>("sigma1", s.sigma1);
  s.prior_mean = l.get<double>("prior_mean", s.prior_mean);
  s.prior_var = l.get<double>("prior_var", s.prior_var);
  s.gamma_shape = l.get<double>("gamma_shape", s.gamma_shape);
  s.gamma_rate = l.get<double>("gamma_rate", s.gamma_rate);
  s.estimator = l.get<std::string>("estimator", "");

  auto& c = s.config;
  c.iterations = l.get<std::size_t>("iterations", c.iterations);
  c.burn_in = l.get<std::size_t>("burn_in", c.burn_in);
  c.replications = l.get<std::size_t>("replications", c.replications);
  c.seed = l.get<std::uint64_t>("seed", c.seed);
  c.batches = l.get<std::size_t>("batches", c.batches);
  c.power.n_steps = l.get<std::size_t>("pp_steps", c.power.n_steps);
  c.power.exponent = l.get<double>("pp_exponent", c.power.exponent);
  c.power.samples_per_step = l.get<std::size_t>("pp_samples", c.power.samples_per_step);
  c.power.burn_in_per_step = l.get<std::size_t>("pp_burn_in", c.power.burn_in_per_step);
  c.ais.n_temperatures = l.get<std::size_t>("ais_temperatures", c.ais.n_temperatures);
  c.ais.n_particles = l.get<std::size_t>("ais_particles", c.ais.n_particles);
  c.ais.exponent = l.get<double>("ais_exponent", c.ais.exponent);
  c.ais.sweeps_per_temperature = l.get<std::size_t>("ais_sweeps", c.ais.sweeps_per_temperature);
  c.nested.n_live = l.get<std::size_t>("ns_live", c.nested.n_live);
  c.nested.termination_ratio = l.get<double>("ns_ratio", c.nested.termination_ratio);
  c.nested.mcmc_steps = l.get<std::size_t>("ns_steps", c.nested.mcmc_steps);
  c.inla.delta_z = l.get<double>("delta_z", c.inla.delta_z);
  c.inla.pi_z = l.get<double>("pi_z", c.inla.pi_z);
  c.laplace.map_sweeps = l.get<std::size_t>("map_sweeps", c.laplace.map_sweeps);
  const std::string ordinate = l.get<std::string>("ordinate", "mean");
  if (ordinate == "mean") {
    c.ordinate = OrdinatePoint::PosteriorMean;
  } else if (ordinate == "median") {
    c.ordinate = OrdinatePoint::PosteriorMedian;
  } else {
    throw ReferenceError("scenario '" + id + "': ordinate must be 'mean' or 'median'");
  }
  s.table = l.get<std::string>("table", "");
  s.row = l.get<std::string>("row", id);
  s.column = l.get<std::string>("column", s.estimator);
  s.group = l.get<std::string>("group", "");

  static const std::set<std::string> models{"toy", "gausslinreg", "probit", "logit", "glmm"};
  if (!models.contains(s.model)) throw ReferenceError("scenario '" + id + "': unknown model '" + s.model + "'");
  const auto& est = known_estimators();
  if (std::find(est.begin(), est.end(), s.estimator) == est.end()) {
    throw ReferenceError("scenario '" + id + "': unknown estimator '" + s.estimator + "'");
  }
  try {
    validate(c);
  } catch (const InvalidArgument& e) {
    throw ReferenceError("scenario '" + id + "': " + e.what());
  }
  return s;
}

}  // namespace

Suite parse_suite(std::string_view text, const std::filesystem::path& base_dir,
                  std::optional<std::uint64_t> seed_override) {
  toml::table root;
  try {
    root = toml::parse(text);
  } catch (const toml::parse_error& e) {
    std::ostringstream msg;
    msg << "config parse error at line " << e.source().begin.line << ": " << e.description();
    throw ReferenceError(msg.str());
  }
  Suite suite;
  suite.data_dir = EVIDENCE_DEFAULT_DATA_DIR;
  const toml::table* defaults = root["defaults"].as_table();
  if (defaults != nullptr) {
    check_keys(*defaults, "[defaults]", true);
    if (const auto dir = (*defaults)["data_dir"].value<std::string>()) {
      const std::filesystem::path p(*dir);
      suite.data_dir = p.is_absolute() ? p : base_dir / p;
    }
  }
  // file order, not key order
  std::vector<std::pair<std::uint32_t, std::string>> order;
  for (const auto& [key, node] : root) {
    const std::string k(key.str());
    if (k == "defaults") continue;
    if (!node.is_table()) throw ReferenceError("config: top-level key '" + k + "' is not a scenario table");
    order.emplace_back(node.source().begin.line, k);
  }
  std::sort(order.begin(), order.end());
  for (const auto& [line, id] : order) {
    const toml::table& t = *root[id].as_table();
    check_keys(t, "scenario '" + id + "'", false);
    Scenario s = read_scenario(id, Lookup(t, defaults, id));
    if (seed_override) s.config.seed = *seed_override;
    suite.scenarios.push_back(std::move(s));
  }
  return suite;
}

Suite load_suite(const std::filesystem::path& config, std::optional<std::uint64_t> seed_override) {
  std::ifstream in(config, std::ios::binary);
  if (!in) throw ReferenceError("cannot open config file " + config.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_suite(buf.str(), config.parent_path(), seed_override);
}

modelzoo::ModelSpec build_model(const Scenario& s, const std::filesystem::path& data_dir) {
  if (s.model == "toy") return modelzoo::ToyGaussian{s.y, s.sigma0, s.sigma1};
  try {
    dataio::Dataset ds;
    std::vector<std::string> covariates = s.covariates;
    if (s.dataset == "uscrime" || s.dataset == "pima") {
      ds = dataio::load_bundled(data_dir, s.dataset);
    } else if (s.dataset == "epilepsy") {
      dataio::load_bundled(data_dir, "epilepsy");  // checksum
      ds = dataio::load_epilepsy(data_dir / "epilepsy.csv");
    } else if (s.dataset == "synthetic-bernoulli" || s.dataset == "synthetic-linreg") {
      if (s.synthetic_n == 0 || s.synthetic_p == 0) {
        throw ReferenceError("scenario '" + s.id + "': synthetic data needs n and p");
      }
      ds = s.dataset == "synthetic-bernoulli" ? dataio::make_bernoulli_synthetic(s.synthetic_n, s.synthetic_p, s.data_seed)
                                              : dataio::make_linreg_synthetic(s.synthetic_n, s.synthetic_p, s.data_seed);
      if (covariates.empty()) {
        for (std::size_t i = 1; i <= s.synthetic_p; ++i) covariates.push_back("x" + std::to_string(i));
      }
    } else {
      throw ReferenceError("scenario '" + s.id + "': unknown dataset '" + s.dataset + "'");
    }
    if (s.model == "glmm") {
      if (s.dataset != "epilepsy") throw ReferenceError("scenario '" + s.id + "': glmm needs the epilepsy dataset");
      return modelzoo::make_epilepsy_glmm(ds);
    }
    for (const auto& c : covariates) {
      if (!ds.has_column(c)) throw ReferenceError("scenario '" + s.id + "': dataset has no column '" + c + "'");
    }
    if (!ds.has_column(s.response)) {
      throw ReferenceError("scenario '" + s.id + "': dataset has no column '" + s.response + "'");
    }
    if (s.standardize) ds = dataio::standardize(ds, covariates);
    if (s.model == "gausslinreg") {
      return modelzoo::make_gausslinreg(ds, s.response, covariates, s.prior_mean, s.prior_var, s.gamma_shape,
                                        s.gamma_rate);
    }
    if (s.model == "probit") return modelzoo::make_probit(ds, s.response, covariates, s.prior_mean, s.prior_var);
    return modelzoo::make_logit(ds, s.response, covariates, s.prior_mean, s.prior_var);
  } catch (const ReferenceError&) {
    throw;
  } catch (const Error& e) {
    throw ReferenceError("scenario '" + s.id + "': " + e.what());
  }
}

EvidenceEstimate run_estimator(const Scenario& s, const modelzoo::ModelSpec& m, std::size_t replication) {
  const EstimatorConfig& cfg = s.config;
  numkit::RngStream rng(cfg.seed, replication);
  const auto kind = modelzoo::kind_of(m);
  const std::string& est = s.estimator;

  const auto oracle = [&](const oracles::OracleResult& r) {
    EvidenceEstimate e;
    e.estimator = est;
    e.log_ml = r.log_ml;
    e.diagnostics["error_bound"] = r.error_bound;
    e.notes["method"] = r.method;
    return e;
  };

  if (est == "exact" || est == "quadrature") {
    const Stopwatch clock;
    EvidenceEstimate e;
    if (kind == modelzoo::ModelKind::ToyGaussian && est == "exact") {
      const auto& t = std::get<modelzoo::ToyGaussian>(m);
      e = oracle(oracles::toy_exact(t.y, t.sigma0, t.sigma1));
    } else if (kind == modelzoo::ModelKind::GaussLinReg) {
      e = oracle(oracles::gausslinreg_quadrature(std::get<modelzoo::GaussLinReg>(m)));
    } else if (kind == modelzoo::ModelKind::ProbitReg) {
      e = oracle(oracles::glm_quadrature(std::get<modelzoo::ProbitReg>(m)));
    } else if (kind == modelzoo::ModelKind::LogitReg) {
      e = oracle(oracles::glm_quadrature(std::get<modelzoo::LogitReg>(m)));
    } else {
      throw InvalidArgument("no " + est + " oracle for model '" + s.model + "'");
    }
    e.wall_time = clock.seconds();
    return e;
  }
  if (est == "inla" || est == "inla-grid" || est == "inla-eb") {
    InlaConfig ic = cfg.inla;
    ic.strategy = est == "inla-eb" ? InlaStrategy::EmpiricalBayes : InlaStrategy::Grid;
    return inla::inla_evidence(modelzoo::latent_gaussian_view(m), ic, cfg.jobs);
  }
  if (est == "laplace" || est == "laplace-map") {
    inla::LaplaceOptions lo;
    lo.center = est == "laplace" ? LaplaceCenter::PosteriorMode : LaplaceCenter::MapFromSample;
    lo.map_sweeps = cfg.laplace.map_sweeps;
    lo.seed = cfg.seed;
    lo.stream = replication;
    return inla::laplace_evidence(m, lo);
  }
  if (est == "harmonic-mean") return mc::harmonic_mean(m, cfg, rng);
  if (est == "chib") {
    if (kind == modelzoo::ModelKind::GaussLinReg) {
      return mc::chib_evidence_gausslinreg(std::get<modelzoo::GaussLinReg>(m), cfg, rng);
    }
    if (kind == modelzoo::ModelKind::ProbitReg) {
      return mc::chib_evidence_probit(std::get<modelzoo::ProbitReg>(m), cfg, rng);
    }
    throw InvalidArgument("chib needs a gausslinreg or probit model");
  }
  if (est == "chib-jeliazkov") return mc::chib_jeliazkov_evidence(m, cfg, rng);
  if (est == "power-posterior") return mc::power_posterior_evidence(m, cfg, rng);
  if (est == "ais") return mc::ais_evidence(m, cfg, rng);
  if (est == "nested-sampling") return mc::nested_sampling_evidence(m, cfg, rng);
  throw ReferenceError("unknown estimator '" + est + "'");
}

}  // namespace evidence::bench
