#pragma once

#include "evidence/numkit/linalg.hpp"
#include "evidence/numkit/rng.hpp"

#include <limits>
#include <variant>

namespace evidence::numkit {

struct Normal {
  double mean = 0.0;
  double sd = 1.0;
};

struct MvNormal {
  Vector mean;
  Matrix cov;
};

// Shape/rate parameterisation: mean shape / rate.
struct Gamma {
  double shape = 1.0;
  double rate = 1.0;
};

// Wishart(df, scale) on p x p SPD matrices with E[W] = df * scale.
struct Wishart {
  double df = 0.0;
  Matrix scale;
};

struct Bernoulli {
  double p = 0.5;
};

struct Poisson {
  double rate = 1.0;
};

// Normal(mean, sd^2) restricted to (lower, upper); one side may be infinite.
struct TruncatedNormal {
  double mean = 0.0;
  double sd = 1.0;
  double lower = -std::numeric_limits<double>::infinity();
  double upper = std::numeric_limits<double>::infinity();
};

using Distribution = std::variant<Normal, MvNormal, Gamma, Wishart, Bernoulli, Poisson>;
using Point = std::variant<double, Vector, Matrix>;

double log_density(const Normal& d, double x);
double log_density(const MvNormal& d, const Vector& x);
double log_density(const Gamma& d, double x);
double log_density(const Wishart& d, const Matrix& x);
double log_density(const Bernoulli& d, double x);
double log_density(const Poisson& d, double x);

// Generic entry point: the point alternative must match the distribution
// (scalar for univariate laws, Vector for MvNormal, Matrix for Wishart).
double log_density(const Distribution& d, const Point& x);

double sample(const Normal& d, RngStream& rng);
Vector sample(const MvNormal& d, RngStream& rng);
double sample(const Gamma& d, RngStream& rng);
Matrix sample(const Wishart& d, RngStream& rng);
double sample(const Bernoulli& d, RngStream& rng);
double sample(const Poisson& d, RngStream& rng);
double sample(const TruncatedNormal& d, RngStream& rng);

// Standard normal truncated to (a, +inf). Uses exponential rejection
// (Robert 1995) for a > 0 and plain rejection otherwise.
double sample_std_normal_above(double a, RngStream& rng);

// Bartlett-decomposition Wishart draw given the Cholesky factor of the scale.
Matrix sample_wishart_chol(double df, const Matrix& scale_lower, RngStream& rng);

}  // namespace evidence::numkit
