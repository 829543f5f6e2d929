#pragma once

#include <functional>

#include "perron/spectral.hpp"

namespace perron {

// External habit application: marginal utility carries a habit transform h
// of the stacked consumption-growth state, and the Euler equation makes h
// a positive eigenfunction of the return-weighted operator with eigenvalue
// 1/beta.
struct HabitModel {
  double gamma = 0.0;  // risk aversion
  int ell = 1;         // habit lag order
  StateModel growth_model;  // StackedNAR over g_t
  // Conditional expected gross return R_i(x, g'); must be positive.
  std::function<double(const Eigen::VectorXd&, double)> return_fn;
};

struct HabitSolution {
  double beta = 0.0;       // recovered as 1/rho
  Eigen::VectorXd h;       // positive, unit weighted norm
  double residual = 0.0;
  SpectrumReport uniqueness_certificate;
};

DiscreteOperator build_habit_operator(const HabitModel& hm, const Grid& grid,
                                      const BuildOptions& opts = {});

HabitSolution recover_habit(const DiscreteOperator& op,
                            const SolverOptions& solver = {},
                            const OracleOptions& oracle = {});

// Oracle construction: returns whose habit operator has (1/beta0, h0) as an
// exact eigenpair, R_i(x, g') = exp(gamma g') h0(x) / (beta0 h0(x')).
HabitModel synthesize_consistent_returns(
    const std::function<double(const Eigen::VectorXd&)>& h0, double beta0,
    double gamma, const StateModel& growth_model);

}  // namespace perron
