#include "perron/habit.hpp"

#include <cmath>

#include "perron/errors.hpp"

namespace perron {

DiscreteOperator build_habit_operator(const HabitModel& hm, const Grid& grid,
                                      const BuildOptions& opts) {
  if (!hm.return_fn) throw Error("return function not set");
  if (hm.gamma < 0.0) throw Error("gamma must be nonnegative");
  SDFSpec sdf;
  const double gamma = hm.gamma;
  auto ret = hm.return_fn;
  // g' is the first coordinate of the shifted stacked state.
  sdf.m = [gamma, ret](const Eigen::VectorXd& x, const Eigen::VectorXd& xp,
                       double) {
    const double gp = xp(0);
    const double r = ret(x, gp);
    if (!(r > 0.0)) throw NegativeSDF("return function is not positive");
    return std::exp(-gamma * gp) * r;
  };
  sdf.name = "habit";
  DiscreteOperator op = build_pricing_operator(hm.growth_model, sdf, grid, opts);
  op.label = "T[habit,gamma=" + std::to_string(gamma) + "]";
  return op;
}

HabitSolution recover_habit(const DiscreteOperator& op,
                            const SolverOptions& solver,
                            const OracleOptions& oracle) {
  const Eigenpair pair = dominant_eigenpair(op, solver);
  HabitSolution sol;
  sol.uniqueness_certificate = full_spectrum_oracle(op, oracle);
  if (sol.uniqueness_certificate.positive_eigenvector_count != 1)
    throw UniquenessFailed(
        "nonnegative eigenvector count is " +
        std::to_string(sol.uniqueness_certificate.positive_eigenvector_count) +
        "; an identification assumption is violated");
  sol.beta = 1.0 / pair.rho;
  sol.h = pair.phi;  // unit weighted norm, strictly positive
  sol.residual = pair.residual;
  return sol;
}

HabitModel synthesize_consistent_returns(
    const std::function<double(const Eigen::VectorXd&)>& h0, double beta0,
    double gamma, const StateModel& growth_model) {
  if (!(beta0 > 0.0)) throw Error("beta0 must be positive");
  if (!std::holds_alternative<StackedNAR>(growth_model))
    throw InvalidModel("growth model must be a stacked AR process");
  HabitModel hm;
  hm.gamma = gamma;
  hm.ell = std::get<StackedNAR>(growth_model).order;
  hm.growth_model = growth_model;
  hm.return_fn = [h0, beta0, gamma](const Eigen::VectorXd& x, double gp) {
    const Eigen::VectorXd xp = stacked_shift(x, gp);
    const double num = h0(x);
    const double den = h0(xp);
    if (!(num > 0.0) || !(den > 0.0)) throw Error("h0 must be positive");
    return std::exp(gamma * gp) * num / (beta0 * den);
  };
  return hm;
}

}  // namespace perron
