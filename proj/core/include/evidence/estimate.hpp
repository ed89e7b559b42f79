#pragma once

#include <chrono>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace evidence {

// Outcome of one evidence computation.
struct EvidenceEstimate {
  std::string estimator;
  double log_ml = 0.0;
  std::optional<double> mc_se;  // absent for deterministic methods
  std::size_t n_iterations = 0;
  double wall_time = 0.0;  // seconds; excluded from deterministic outputs
  std::map<std::string, double> diagnostics;
  std::map<std::string, std::string> notes;
  std::vector<double> trace;  // ladder means, grid values, ... (method specific)
};

// Throws InvalidArgument unless log_ml is finite and mc_se >= 0.
void check_estimate(const EvidenceEstimate& e);

enum class OrdinatePoint { PosteriorMean, PosteriorMedian };
enum class InlaStrategy { EmpiricalBayes, Grid };
enum class LaplaceCenter { PosteriorMode, MapFromSample };

struct PowerPosteriorConfig {
  std::size_t n_steps = 10;
  double exponent = 5.0;
  std::size_t samples_per_step = 20000;
  std::size_t burn_in_per_step = 1000;
};

struct AisConfig {
  std::size_t n_temperatures = 100;
  std::size_t n_particles = 2000;
  double exponent = 5.0;  // t_k = (k / K)^exponent
  std::size_t sweeps_per_temperature = 1;
};

struct NestedSamplingConfig {
  std::size_t n_live = 2000;
  double termination_ratio = 1e-8;
  std::size_t mcmc_steps = 20;
  std::size_t max_iterations = 2000000;
};

struct InlaConfig {
  InlaStrategy strategy = InlaStrategy::Grid;
  double delta_z = 0.75;
  double pi_z = 6.0;
};

struct LaplaceConfig {
  LaplaceCenter center = LaplaceCenter::PosteriorMode;
  std::size_t map_sweeps = 10000;
};

struct EstimatorConfig {
  std::size_t iterations = 100000;
  std::size_t burn_in = 1000;
  std::size_t replications = 1;
  std::uint64_t seed = 1;
  std::size_t batches = 50;
  std::size_t jobs = 1;  // worker threads inside one estimator (AIS particles, grid points)
  PowerPosteriorConfig power;
  AisConfig ais;
  NestedSamplingConfig nested;
  OrdinatePoint ordinate = OrdinatePoint::PosteriorMean;
  InlaConfig inla;
  LaplaceConfig laplace;
};

// Throws InvalidArgument when a count is zero or a ratio is out of range.
void validate(const EstimatorConfig& cfg);

class Stopwatch {
 public:
  Stopwatch() : start_(std::chrono::steady_clock::now()) {}
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_;
};

}  // namespace evidence
