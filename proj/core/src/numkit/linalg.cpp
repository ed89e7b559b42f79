#include "evidence/numkit/linalg.hpp"

#include "evidence/errors.hpp"

#include <cmath>

namespace evidence {

NotPositiveDefinite::NotPositiveDefinite(std::size_t minor, const std::string& context)
    : Error(context + ": matrix is not positive definite (leading minor of order " +
            std::to_string(minor) + " is not positive)"),
      minor_(minor) {}

namespace numkit {

CholeskyFactor chol_logdet(const Matrix& a, const std::string& context) {
  if (a.rows() != a.cols()) {
    throw InvalidArgument(context + ": matrix is not square");
  }
  const Eigen::Index n = a.rows();
  CholeskyFactor out;
  out.lower = Matrix::Zero(n, n);
  Matrix& l = out.lower;
  double log_det = 0.0;
  for (Eigen::Index j = 0; j < n; ++j) {
    double d = a(j, j);
    if (j > 0) d -= l.row(j).head(j).squaredNorm();
    if (!(d > 0.0) || !std::isfinite(d)) {
      throw NotPositiveDefinite(static_cast<std::size_t>(j + 1), context);
    }
    const double ljj = std::sqrt(d);
    l(j, j) = ljj;
    log_det += std::log(ljj);
    if (j + 1 < n) {
      const Eigen::Index rest = n - j - 1;
      Vector col = a.col(j).tail(rest);
      if (j > 0) col.noalias() -= l.bottomLeftCorner(rest, j) * l.row(j).head(j).transpose();
      l.col(j).tail(rest) = col / ljj;
    }
  }
  out.log_det = 2.0 * log_det;
  return out;
}

Vector CholeskyFactor::solve(const Vector& b) const {
  Vector y = lower.triangularView<Eigen::Lower>().solve(b);
  return lower.transpose().triangularView<Eigen::Upper>().solve(y);
}

Matrix CholeskyFactor::solve(const Matrix& b) const {
  Matrix y = lower.triangularView<Eigen::Lower>().solve(b);
  return lower.transpose().triangularView<Eigen::Upper>().solve(y);
}

Vector CholeskyFactor::solve_upper(const Vector& z) const {
  return lower.transpose().triangularView<Eigen::Upper>().solve(z);
}

Matrix CholeskyFactor::inverse() const {
  return solve(Matrix(Matrix::Identity(lower.rows(), lower.cols())));
}

Matrix symmetrize(const Matrix& a) { return 0.5 * (a + a.transpose()); }

}  // namespace numkit
}  // namespace evidence
