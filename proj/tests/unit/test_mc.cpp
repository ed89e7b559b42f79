#include "evidence/dataio/dataset.hpp"
#include "evidence/errors.hpp"
#include "evidence/inla/inla.hpp"
#include "evidence/mc/estimators.hpp"
#include "evidence/oracles/oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace evidence;
using namespace evidence::modelzoo;
using numkit::RngStream;

namespace {

const std::filesystem::path kData = EVIDENCE_TEST_DATA_DIR;

EstimatorConfig quick(std::size_t iterations) {
  EstimatorConfig c;
  c.iterations = iterations;
  c.burn_in = 500;
  return c;
}

BinaryRegression one_covariate(int n, std::uint64_t seed, bool probit) {
  RngStream rng(seed, 0);
  BinaryRegression m;
  m.X.resize(n, 1);
  m.y.resize(n);
  for (int i = 0; i < n; ++i) {
    m.X(i, 0) = rng.normal();
    const double lin = 0.9 * m.X(i, 0);
    const double p = probit ? 0.5 * std::erfc(-lin / std::sqrt(2.0)) : 1.0 / (1.0 + std::exp(-lin));
    m.y[i] = rng.uniform() < p ? 1.0 : 0.0;
  }
  m.prior_var = 4.0;
  return m;
}

GaussLinReg pinned_sigma_linreg() {
  RngStream rng(21, 0);
  GaussLinReg m;
  m.X.resize(30, 2);
  m.y.resize(30);
  for (int i = 0; i < 30; ++i) {
    m.X(i, 0) = 1.0;
    m.X(i, 1) = rng.normal();
    m.y[i] = 1.0 + 0.5 * m.X(i, 1) + std::sqrt(0.5) * rng.normal();
  }
  m.prior_var = 4.0;
  m.gamma_shape = 1e8;  // 1/sigma^2 pinned at 2
  m.gamma_rate = 5e7;
  return m;
}

}  // namespace

TEST(Config, ValidateRejectsZeroCounts) {
  EstimatorConfig c;
  EXPECT_NO_THROW(validate(c));
  c.iterations = 0;
  EXPECT_THROW(validate(c), InvalidArgument);
  c = {};
  c.nested.termination_ratio = 2.0;
  EXPECT_THROW(validate(c), InvalidArgument);
  c = {};
  c.batches = 0;
  EXPECT_THROW(validate(c), InvalidArgument);
}

TEST(Ladder, PowerSpacing) {
  const auto t = mc::power_ladder(10, 5.0);
  ASSERT_EQ(t.size(), 11u);
  EXPECT_EQ(t.front(), 0.0);
  EXPECT_EQ(t.back(), 1.0);
  EXPECT_NEAR(t[1], 1e-5, 1e-18);
}

TEST(HarmonicMean, ToyNarrowPriorIsAccurate) {
  RngStream rng(1, 0);
  const auto e = mc::harmonic_mean(ModelSpec(ToyGaussian{2.0, 0.1, 1.0}), quick(200000), rng);
  EXPECT_NEAR(e.log_ml, -2.9041, 0.002);
}

TEST(HarmonicMean, ToyWidePriorIsBiasedUp) {
  RngStream rng(2, 0);
  const auto e = mc::harmonic_mean(ModelSpec(ToyGaussian{2.0, 1000.0, 1.0}), quick(200000), rng);
  EXPECT_GT(e.log_ml, -7.8267 + 4.0);
}

TEST(Chib, LinregPointMassSigmaMatchesClosedForm) {
  const GaussLinReg m = pinned_sigma_linreg();
  const double exact = oracles::gausslinreg_exact_fixed_sigma(m.X, m.y, m.prior_mean, m.prior_var, 0.5).log_ml;
  RngStream rng(3, 0);
  const auto e = mc::chib_evidence_gausslinreg(m, quick(100000), rng);
  EXPECT_NEAR(e.log_ml, exact, 0.005);
}

TEST(Chib, LinregAgreesWithQuadrature) {
  GaussLinReg m = pinned_sigma_linreg();
  m.gamma_shape = 2.0;
  m.gamma_rate = 1.0;
  RngStream rng(4, 0);
  const auto e = mc::chib_evidence_gausslinreg(m, quick(50000), rng);
  EXPECT_NEAR(e.log_ml, oracles::gausslinreg_quadrature(m).log_ml, 0.02);
  ASSERT_TRUE(e.mc_se.has_value());
}

TEST(Chib, ProbitAgreesWithQuadrature) {
  ProbitReg m;
  static_cast<BinaryRegression&>(m) = one_covariate(50, 5, true);
  RngStream rng(6, 0);
  const auto e = mc::chib_evidence_probit(m, quick(100000), rng);
  const double q = oracles::glm_quadrature(m).log_ml;
  EXPECT_NEAR(e.log_ml, q, 0.02);
  EXPECT_NEAR(e.log_ml, q, 3.0 * *e.mc_se + 1e-3);
}

TEST(ChibJeliazkov, LogitAgreesWithQuadrature) {
  LogitReg m;
  static_cast<BinaryRegression&>(m) = one_covariate(50, 7, false);
  RngStream rng(8, 0);
  const auto e = mc::chib_jeliazkov_evidence(ModelSpec(m), quick(100000), rng);
  EXPECT_NEAR(e.log_ml, oracles::glm_quadrature(m).log_ml, 0.02);
}

TEST(ChibJeliazkov, RejectsHyperparameterModels) {
  RngStream rng(9, 0);
  EXPECT_THROW(mc::chib_jeliazkov_evidence(ModelSpec(pinned_sigma_linreg()), quick(1000), rng), InvalidArgument);
}

TEST(PowerPosterior, ToyWithFineLadder) {
  EstimatorConfig c = quick(1000);
  c.power.n_steps = 100;
  c.power.samples_per_step = 5000;
  RngStream rng(10, 0);
  const auto e = mc::power_posterior_evidence(ModelSpec(ToyGaussian{2.0, 10.0, 1.0}), c, rng);
  EXPECT_NEAR(e.log_ml, -3.2463, 0.02);
  EXPECT_EQ(e.trace.size(), 101u);
}

TEST(PowerPosterior, LadderRefinementApproachesLaplaceOnPima) {
  const std::vector<std::string> cov{"npreg", "glu", "bmi", "ped"};
  const auto pima = dataio::standardize(dataio::load_bundled(kData, "pima"), cov);
  const ModelSpec m(make_logit(pima, "diabetes", cov, 1.0, 100.0));
  const double laplace = inla::laplace_evidence(m).log_ml;
  double prev = 1e9;
  for (std::size_t n : {2u, 10u, 30u}) {
    EstimatorConfig c = quick(1000);
    c.power.n_steps = n;
    c.power.samples_per_step = 4000;
    c.power.burn_in_per_step = 200;
    RngStream rng(11, 0);
    const double gap = std::abs(mc::power_posterior_evidence(m, c, rng).log_ml - laplace);
    EXPECT_LT(gap, prev) << n << " rungs";
    prev = gap;
  }
}

TEST(Ais, LinregPointMassSigmaWithinThreeSe) {
  const GaussLinReg m = pinned_sigma_linreg();
  const double exact = oracles::gausslinreg_exact_fixed_sigma(m.X, m.y, m.prior_mean, m.prior_var, 0.5).log_ml;
  EstimatorConfig c = quick(1000);
  c.ais.n_particles = 1000;
  RngStream rng(12, 0);
  const auto e = mc::ais_evidence(ModelSpec(m), c, rng);
  EXPECT_NEAR(e.log_ml, exact, 3.0 * *e.mc_se);
}

TEST(Ais, IdenticalAcrossWorkerCounts) {
  LogitReg m;
  static_cast<BinaryRegression&>(m) = one_covariate(40, 13, false);
  EstimatorConfig c = quick(1000);
  c.ais.n_particles = 200;
  c.ais.n_temperatures = 30;
  RngStream r1(14, 0), r3(14, 0);
  const auto a = mc::ais_evidence(ModelSpec(m), c, r1);
  c.jobs = 3;
  const auto b = mc::ais_evidence(ModelSpec(m), c, r3);
  EXPECT_EQ(a.log_ml, b.log_ml);
  EXPECT_EQ(*a.mc_se, *b.mc_se);
}

TEST(NestedSampling, ToyWithinTolerance) {
  EstimatorConfig c = quick(1000);
  c.nested.n_live = 500;
  RngStream rng(15, 0);
  const auto e = mc::nested_sampling_evidence(ModelSpec(ToyGaussian{2.0, 10.0, 1.0}), c, rng);
  EXPECT_NEAR(e.log_ml, -3.2463, 0.1);
  EXPECT_GT(e.diagnostics.at("information"), 0.0);
}

TEST(NestedSampling, LogitAgreesWithQuadrature) {
  LogitReg m;
  static_cast<BinaryRegression&>(m) = one_covariate(50, 16, false);
  EstimatorConfig c = quick(1000);
  c.nested.n_live = 400;
  RngStream rng(17, 0);
  const auto e = mc::nested_sampling_evidence(ModelSpec(m), c, rng);
  EXPECT_NEAR(e.log_ml, oracles::glm_quadrature(m).log_ml, 3.0 * *e.mc_se);
}

TEST(Estimators, SameSeedSameBytes) {
  EstimatorConfig c = quick(5000);
  const ModelSpec toy(ToyGaussian{1.0, 2.0, 1.0});
  RngStream a(18, 2), b(18, 2);
  EXPECT_EQ(mc::harmonic_mean(toy, c, a).log_ml, mc::harmonic_mean(toy, c, b).log_ml);
  c.nested.n_live = 100;
  RngStream d(19, 0), f(19, 0);
  EXPECT_EQ(mc::nested_sampling_evidence(toy, c, d).log_ml, mc::nested_sampling_evidence(toy, c, f).log_ml);
}
