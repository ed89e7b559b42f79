#pragma once

#include "evidence/modelzoo/model_spec.hpp"

#include <string>
#include <variant>

namespace evidence::oracles {

using numkit::Matrix;
using numkit::Vector;

struct OracleResult {
  double log_ml = 0.0;
  std::string method;  // "closed-form" or "quadrature"
  double error_bound = 0.0;
};

// log N(y; 0, sigma0^2 + sigma1^2).
OracleResult toy_exact(double y, double sigma0, double sigma1);

// log N(y; X mu 1, sigma2 I + prior_var X X^T).
OracleResult gausslinreg_exact_fixed_sigma(const Matrix& X, const Vector& y, double prior_mean, double prior_var,
                                           double sigma2);

// Gauss-Legendre over log(1/sigma^2) of the fixed-variance closed form
// against the Gamma prior. The bound is |I(n) - I(2n)|; throws
// ConvergenceFailure when it exceeds `tolerance`.
OracleResult gausslinreg_quadrature(const modelzoo::GaussLinReg& m, int n_nodes = 128, double tolerance = 1e-6);

// Tensor trapezoid over prior mean +- 10 prior SD for binary regressions with
// at most three coefficients. The bound compares `nodes` with nodes / 2.
OracleResult glm_quadrature(const modelzoo::BinaryRegression& m, bool probit, int nodes_per_axis = 2048,
                            double tolerance = 1e-4);
OracleResult glm_quadrature(const modelzoo::ProbitReg& m, int nodes_per_axis = 2048);
OracleResult glm_quadrature(const modelzoo::LogitReg& m, int nodes_per_axis = 2048);

// Gauss-Legendre nodes and weights on [-1, 1].
void gauss_legendre(int n, Vector& nodes, Vector& weights);

}  // namespace evidence::oracles
