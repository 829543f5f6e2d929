#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "perron/spectral.hpp"

namespace perron {

struct YieldCurve {
  std::vector<int> horizons;    // 1..n_max
  Eigen::MatrixXd prices;       // n_max x n, T_n 1(x_i)
  Eigen::MatrixXd yields;       // y_n(x) = (T_n 1(x))^{-1/n} - 1
};

YieldCurve yield_curve(const DiscreteOperator& op, int n_max);

// e_n = || rho^{-n} T^n psi - <psi, phi*> phi ||_w for n = 1..n_max.
Eigen::VectorXd long_run_limit_check(const DiscreteOperator& op,
                                     const Eigenpair& pair,
                                     const Eigen::VectorXd& psi, int n_max);

struct Decomposition {
  Eigenpair eigenpair;
  Eigen::MatrixXd twisted_kernel;  // row-stochastic P~(i,j)
  Eigen::VectorXd pi_tilde;        // stationary row vector of P~
  // Long-run constants <psi, phi*> for the payoff battery
  // {1, x1, x1^2, 1{x1 >= median}, 1{x1 < median}}.
  std::vector<std::string> battery_names;
  std::vector<double> long_run_constants;
};

Decomposition decompose(const DiscreteOperator& op, const Eigenpair& pair,
                        const OracleOptions& oracle = {});

// Per-step permanent/transitory factors along a simulated path. Their
// product recovers the one-period SDF exactly.
struct PathDecomposition {
  std::vector<double> sdf;         // m(X_t, X_{t+1}, Y_{t+1})
  std::vector<double> transitory;  // rho phi(X_t) / phi(X_{t+1})
  std::vector<double> permanent;   // m phi(X_{t+1}) / (rho phi(X_t))
  long long off_grid_clamps = 0;
};

PathDecomposition decompose_along_path(const SDFSpec& sdf,
                                       const StateModel& model,
                                       const Eigenpair& pair, const Grid& grid,
                                       const PathSample& path);

}  // namespace perron
