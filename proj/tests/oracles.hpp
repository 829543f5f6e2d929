#pragma once

// Test-only oracles, independent of the library's computation paths:
// closed forms for the exponential-affine CCAPM setup, Yule-Walker moments
// for linear AR(2), and seeded random matrix generators.

#include <Eigen/Dense>
#include <cmath>

#include "perron/operator_core.hpp"
#include "perron/rng.hpp"

namespace oracles {

// CCAPM m = beta exp(-gamma x') on a Gaussian AR(1): substituting
// phi(x) = exp(b x) into the Euler equation and matching coefficients gives
// b = -gamma a / (1 - a) and rho = beta exp(gamma^2 sigma^2 / (2 (1-a)^2)).
struct AffineCCAPM {
  double a, sigma, gamma, beta;
  double b() const { return -gamma * a / (1.0 - a); }
  double rho() const {
    return beta * std::exp(gamma * gamma * sigma * sigma /
                           (2.0 * (1.0 - a) * (1.0 - a)));
  }
  double phi(double x) const { return std::exp(b() * x); }
};

// Stationary covariance of (w_t, w_{t-1}) for the linear AR(2)
// w_t = b1 w_{t-1} + b2 w_{t-2} + u, from the Yule-Walker equations.
struct AR2Moments {
  double var_w;   // gamma_0
  double cov_w1;  // gamma_1
};

inline AR2Moments ar2_yule_walker(double b1, double b2, double sigma_u) {
  const double rho1 = b1 / (1.0 - b2);
  const double denom =
      1.0 - b1 * rho1 - b2 * (b1 * rho1 + b2);
  AR2Moments m;
  m.var_w = sigma_u * sigma_u / denom;
  m.cov_w1 = rho1 * m.var_w;
  return m;
}

inline Eigen::MatrixXd random_positive_matrix(int n, std::uint64_t seed) {
  perron::Rng rng(seed);
  Eigen::MatrixXd M(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) M(i, j) = 0.05 + rng.uniform();
  return M;
}

// Wrap a raw nonnegative matrix as a DiscreteOperator on a uniform-weight
// unit grid; grid points are the integers 0..n-1.
inline perron::DiscreteOperator wrap_matrix(const Eigen::MatrixXd& M) {
  perron::DiscreteOperator op;
  const Eigen::Index n = M.rows();
  op.matrix = M;
  op.grid.points.resize(n, 1);
  for (Eigen::Index i = 0; i < n; ++i) op.grid.points(i, 0) = double(i);
  op.grid.weights = Eigen::VectorXd::Constant(n, 1.0 / double(n));
  op.grid.axes = {op.grid.points.col(0)};
  op.label = "wrapped";
  return op;
}

inline perron::StateModel linear_ar2(double b1, double b2, double sigma_u) {
  perron::StackedNAR m;
  m.order = 2;
  m.mean_fn = [b1, b2](const Eigen::VectorXd& x) {
    return b1 * x(0) + b2 * x(1);
  };
  m.innovation = perron::InnovationLaw::normal(sigma_u);
  return m;
}

inline perron::StateModel linear_nar(const Eigen::VectorXd& coeffs,
                                     double sigma_u) {
  perron::StackedNAR m;
  m.order = static_cast<int>(coeffs.size());
  m.mean_fn = [coeffs](const Eigen::VectorXd& x) { return coeffs.dot(x); };
  m.innovation = perron::InnovationLaw::normal(sigma_u);
  return m;
}

}  // namespace oracles
