#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "perron/errors.hpp"
#include "perron/pricing.hpp"

using namespace perron;

namespace {

DiscreteChain two_state() {
  DiscreteChain c;
  c.transition.resize(2, 2);
  c.transition << 0.9, 0.1, 0.4, 0.6;
  return c;
}

DiscreteOperator affine_op(Grid* grid_out = nullptr) {
  const StateModel model = GaussianAR1{0.5, 0.1};
  const Grid grid = stationary_grid(model, 48);
  if (grid_out) *grid_out = grid;
  const SDFSpec sdf = SDFSpec::ccapm(
      0.98, 2.0, [](const Eigen::VectorXd&, const Eigen::VectorXd& xp,
                    double) { return xp(0); });
  return build_pricing_operator(model, sdf, grid);
}

}  // namespace

TEST_CASE("flat yield curve for a constant SDF on a chain") {
  const StateModel model = two_state();
  const DiscreteOperator op = build_pricing_operator(
      model, SDFSpec::constant(0.96), stationary_grid(model, 2));
  const YieldCurve yc = yield_curve(op, 50);
  REQUIRE(yc.horizons.size() == 50);
  CHECK(yc.horizons.front() == 1);
  CHECK(yc.horizons.back() == 50);
  CHECK((yc.yields.array() - (1.0 / 0.96 - 1.0)).abs().maxCoeff() < 1e-12);
  // Prices compound: p_n = 0.96^n.
  CHECK(yc.prices(9, 0) == doctest::Approx(std::pow(0.96, 10)).epsilon(1e-12));
}

TEST_CASE("yield curve rejects vanishing prices") {
  DiscreteOperator op =
      oracles::wrap_matrix(oracles::random_positive_matrix(3, 5));
  op.matrix.row(2).setZero();
  CHECK_THROWS_AS(yield_curve(op, 5), ZeroBondPrice);
  CHECK_THROWS_AS(yield_curve(op, 0), Error);
}

TEST_CASE("long-run limit: geometric decay and exact eigen-direction") {
  const DiscreteOperator op = affine_op();
  SolverOptions tight;
  tight.tol = 1e-14;
  const Eigenpair pair = dominant_eigenpair(op, tight);

  const Eigen::VectorXd psi = Eigen::VectorXd::Ones(op.grid.size());
  const Eigen::VectorXd e = long_run_limit_check(op, pair, psi, 60);
  for (int n = 1; n < 40; ++n) CHECK(e(n) < e(n - 1));
  // Decay factor approaches the gap (0.5 for this model).
  CHECK(e(30) / e(29) == doctest::Approx(pair.gap).epsilon(1e-3));

  const Eigen::VectorXd e_phi = long_run_limit_check(op, pair, pair.phi, 60);
  CHECK(e_phi.maxCoeff() < 1e-10);

  CHECK_THROWS_AS(long_run_limit_check(op, pair, Eigen::VectorXd::Ones(3), 10),
                  DimensionMismatch);
}

TEST_CASE("twisted kernel is a stationary stochastic matrix") {
  Grid grid;
  const DiscreteOperator op = affine_op(&grid);
  const Eigenpair pair = dominant_eigenpair(op);
  const Decomposition dec = decompose(op, pair);

  CHECK((dec.twisted_kernel.rowwise().sum().array() - 1.0).abs().maxCoeff() <
        1e-10);
  CHECK(dec.twisted_kernel.minCoeff() >= 0.0);
  // pi_tilde is the left fixed point and matches phi phi* w.
  const Eigen::VectorXd back =
      dec.twisted_kernel.transpose() * dec.pi_tilde;
  CHECK((back - dec.pi_tilde).cwiseAbs().maxCoeff() < 1e-10);
  Eigen::VectorXd v =
      pair.phi.array() * pair.phi_star.array() * grid.weights.array();
  v /= v.sum();
  CHECK((dec.pi_tilde - v).cwiseAbs().maxCoeff() < 1e-10);

  REQUIRE(dec.battery_names.size() == 5);
  REQUIRE(dec.long_run_constants.size() == 5);
  // Indicator split is exhaustive: constants for the halves sum to the
  // constant for the unit payoff.
  CHECK(dec.long_run_constants[3] + dec.long_run_constants[4] ==
        doctest::Approx(dec.long_run_constants[0]).epsilon(1e-12));
  CHECK(dec.long_run_constants[0] ==
        doctest::Approx(weighted_inner(grid.weights,
                                       Eigen::VectorXd::Ones(grid.size()),
                                       pair.phi_star))
            .epsilon(1e-12));
}

TEST_CASE("a corrupted eigenpair is rejected as non-stochastic") {
  const DiscreteOperator op = affine_op();
  Eigenpair pair = dominant_eigenpair(op);
  pair.rho *= 1.05;
  CHECK_THROWS_AS(decompose(op, pair), NonStochasticKernel);
}

TEST_CASE("path decomposition factors multiply back to the SDF") {
  Grid grid;
  const DiscreteOperator op = affine_op(&grid);
  const Eigenpair pair = dominant_eigenpair(op);
  const StateModel model = GaussianAR1{0.5, 0.1};
  const SDFSpec sdf = SDFSpec::ccapm(
      0.98, 2.0, [](const Eigen::VectorXd&, const Eigen::VectorXd& xp,
                    double) { return xp(0); });
  const PathSample path = simulate_path(model, 17, 2000);
  const PathDecomposition pd =
      decompose_along_path(sdf, model, pair, grid, path);
  REQUIRE(pd.sdf.size() == 2000);
  double prod_err = 0;
  for (std::size_t t = 0; t < pd.sdf.size(); ++t)
    prod_err = std::max(prod_err,
                        std::abs(pd.permanent[t] * pd.transitory[t] - pd.sdf[t]));
  CHECK(prod_err < 1e-13);
  CHECK(pd.off_grid_clamps == 0);

  // Transitory product telescopes to rho^T phi(X_0) / phi(X_T).
  double logprod = 0;
  for (const double tr : pd.transitory) logprod += std::log(tr);
  const double phi0 = interp_value(grid, pair.phi, path.states.front());
  const double phiT = interp_value(grid, pair.phi, path.states.back());
  CHECK(logprod == doctest::Approx(2000.0 * std::log(pair.rho) +
                                   std::log(phi0 / phiT))
                       .epsilon(1e-9));
}

TEST_CASE("malformed path is rejected") {
  Grid grid;
  const DiscreteOperator op = affine_op(&grid);
  const Eigenpair pair = dominant_eigenpair(op);
  PathSample path = simulate_path(GaussianAR1{0.5, 0.1}, 3, 10);
  path.shocks.pop_back();
  CHECK_THROWS_AS(decompose_along_path(SDFSpec::unit(), GaussianAR1{0.5, 0.1},
                                       pair, grid, path),
                  Error);
}
