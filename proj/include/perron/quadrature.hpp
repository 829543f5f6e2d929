#pragma once

#include <Eigen/Dense>

namespace perron {

struct QuadRule {
  Eigen::VectorXd nodes;
  Eigen::VectorXd weights;
};

// Gauss-Hermite rule in probabilists' form: nodes/weights integrate
// f against the standard normal density, i.e. sum w_i f(x_i) ~ E[f(Z)].
QuadRule gauss_hermite_normal(int n);

// Gauss-Legendre on (0, 1); weights sum to 1.
QuadRule gauss_legendre_unit(int n);

}  // namespace perron
