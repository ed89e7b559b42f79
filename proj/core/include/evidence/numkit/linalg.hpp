#pragma once

#include <Eigen/Dense>

#include <string>

namespace evidence::numkit {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

struct CholeskyFactor {
  Matrix lower;       // L with L * L^T = A
  double log_det = 0; // log |A| = 2 * sum(log L_ii)

  // Solves A x = b.
  Vector solve(const Vector& b) const;
  Matrix solve(const Matrix& b) const;
  // Returns L^{-T} z; a draw from N(0, A^{-1}) when z is standard normal.
  Vector solve_upper(const Vector& z) const;
  Matrix inverse() const;
};

// Dense Cholesky with explicit breakdown reporting. Throws
// NotPositiveDefinite naming the first leading minor that is not positive.
CholeskyFactor chol_logdet(const Matrix& a, const std::string& context = "chol_logdet");

// Returns a.selfadjointView<Lower>() symmetrised as (a + a^T) / 2.
Matrix symmetrize(const Matrix& a);

}  // namespace evidence::numkit
