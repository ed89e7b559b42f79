#include "evidence/dataio/dataset.hpp"
#include "evidence/inla/inla.hpp"
#include "evidence/modelzoo/kernels.hpp"
#include "evidence/modelzoo/latent_view.hpp"
#include "evidence/modelzoo/tempered.hpp"

#include <benchmark/benchmark.h>

using namespace evidence;
using namespace evidence::modelzoo;

namespace {

const std::filesystem::path kData = EVIDENCE_BENCH_DATA_DIR;

LogitReg pima_m1() {
  const std::vector<std::string> cov{"npreg", "glu", "bmi", "ped"};
  return make_logit(dataio::standardize(dataio::load_bundled(kData, "pima"), cov), "diabetes", cov, 1.0, 100.0);
}

PoissonGLMM epilepsy() { return make_epilepsy_glmm(dataio::load_epilepsy(kData / "epilepsy.csv")); }

void BM_Cholesky(benchmark::State& state) {
  const auto n = state.range(0);
  numkit::RngStream rng(1, 0);
  numkit::Matrix a(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j) a(i, j) = rng.normal();
  a = a * a.transpose() + numkit::Matrix::Identity(n, n);
  for (auto _ : state) benchmark::DoNotOptimize(numkit::chol_logdet(a).log_det);
}
BENCHMARK(BM_Cholesky)->Arg(10)->Arg(120)->Arg(500);

void BM_ProbitGibbsSweep(benchmark::State& state) {
  const auto ds = dataio::make_bernoulli_synthetic(2000, 11, 20240607);
  std::vector<std::string> cov;
  for (int i = 1; i <= 11; ++i) cov.push_back("x" + std::to_string(i));
  const ProbitGibbs g(make_probit(ds, "y", cov, 0.0, 100.0));
  numkit::RngStream rng(2, 0);
  ProbitState s{numkit::Vector::Zero(12), g.draw_latent(numkit::Vector::Zero(12), rng)};
  for (auto _ : state) s = g.step(s, rng);
}
BENCHMARK(BM_ProbitGibbsSweep);

void BM_TemperedLogitSweep(benchmark::State& state) {
  const TemperedTarget t{ModelSpec(pima_m1())};
  numkit::RngStream rng(3, 0);
  numkit::Vector psi = t.initial_state();
  const auto k = t.tuning(0.5);
  for (auto _ : state) t.sweep(psi, k, rng);
}
BENCHMARK(BM_TemperedLogitSweep);

void BM_TemperedGlmmSweep(benchmark::State& state) {
  const TemperedTarget t{ModelSpec(epilepsy())};
  numkit::RngStream rng(4, 0);
  numkit::Vector psi = t.initial_state();
  const auto k = t.tuning(1.0);
  for (auto _ : state) t.sweep(psi, k, rng);
}
BENCHMARK(BM_TemperedGlmmSweep);

void BM_GaussianApproxGlmm(benchmark::State& state) {
  const auto view = latent_gaussian_view(ModelSpec(epilepsy()));
  const numkit::Vector theta = wishart_block_theta(4.0 * numkit::Matrix::Identity(2, 2));
  for (auto _ : state) benchmark::DoNotOptimize(inla::gaussian_approx(view, theta).log_likelihood);
}
BENCHMARK(BM_GaussianApproxGlmm)->Unit(benchmark::kMillisecond);

void BM_InlaPima(benchmark::State& state) {
  const auto view = latent_gaussian_view(ModelSpec(pima_m1()));
  for (auto _ : state) benchmark::DoNotOptimize(inla::inla_evidence(view).log_ml);
}
BENCHMARK(BM_InlaPima)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
