#include <doctest.h>

#include <cmath>

#include "oracles.hpp"
#include "perron/errors.hpp"
#include "perron/spectral.hpp"

using namespace perron;

TEST_CASE("symmetric 2x2 has the closed-form eigenpair") {
  Eigen::MatrixXd M(2, 2);
  M << 2.0, 1.0, 1.0, 2.0;
  const DiscreteOperator op = oracles::wrap_matrix(M);
  const Eigenpair pair = dominant_eigenpair(op);
  CHECK(pair.rho == doctest::Approx(3.0).epsilon(1e-12));
  CHECK(pair.phi(0) == doctest::Approx(pair.phi(1)).epsilon(1e-10));
  CHECK(pair.gap == doctest::Approx(1.0 / 3.0).epsilon(1e-3));
  CHECK(pair.residual < 1e-11);
  // Normalizations: ||phi||_w = 1 and <phi, phi*>_w = 1.
  CHECK(weighted_norm(op.grid.weights, pair.phi) ==
        doctest::Approx(1.0).epsilon(1e-12));
  CHECK(weighted_inner(op.grid.weights, pair.phi, pair.phi_star) ==
        doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("phi_star is a left eigenvector in the weighted sense") {
  const DiscreteOperator op =
      oracles::wrap_matrix(oracles::random_positive_matrix(12, 21));
  const Eigenpair pair = dominant_eigenpair(op);
  const Eigen::VectorXd resid =
      adjoint(op).matrix * pair.phi_star - pair.rho * pair.phi_star;
  CHECK(weighted_norm(op.grid.weights, resid) < 1e-9 * pair.rho);
}

TEST_CASE("oracle agrees with power iteration on random positives") {
  for (int k = 0; k < 5; ++k) {
    const DiscreteOperator op = oracles::wrap_matrix(
        oracles::random_positive_matrix(15, child_seed(77, k)));
    const Eigenpair pair = dominant_eigenpair(op);
    const SpectrumReport rep = full_spectrum_oracle(op);
    CHECK(std::abs(pair.rho - rep.spectral_radius) < 1e-9 * rep.spectral_radius);
    CHECK(rep.is_simple);
    CHECK(rep.is_isolated);
    CHECK(rep.on_circle_count == 1);
    CHECK(rep.positive_eigenvector_count == 1);
    CHECK(pair.gap ==
          doctest::Approx(rep.second_modulus / rep.spectral_radius).epsilon(0.05));
  }
}

TEST_CASE("diagonal matrix: every basis vector is a nonnegative eigenvector") {
  Eigen::MatrixXd D = Eigen::VectorXd::LinSpaced(4, 1.0, 4.0).asDiagonal();
  const SpectrumReport rep = full_spectrum_oracle(oracles::wrap_matrix(D));
  CHECK(rep.positive_eigenvector_count == 4);
  CHECK(rep.spectral_radius == doctest::Approx(4.0));
  CHECK(rep.second_modulus == doctest::Approx(3.0));
}

TEST_CASE("permutation matrix fails the circle and positivity conclusions") {
  Eigen::MatrixXd P(2, 2);
  P << 0.0, 1.0, 1.0, 0.0;
  const DiscreteOperator op = oracles::wrap_matrix(P);
  const SpectrumReport rep = full_spectrum_oracle(op);
  CHECK(rep.on_circle_count == 2);  // eigenvalues +1 and -1

  Eigenpair pair;  // (1, 1) is the dominant eigenvector with rho = 1
  pair.rho = 1.0;
  pair.phi = Eigen::VectorXd::Constant(2, 1.0);
  pair.phi_star = Eigen::VectorXd::Constant(2, 1.0);
  const ConclusionCheck cc = verify_theorem_conclusions(op, pair);
  CHECK_FALSE(cc.all_pass);
  CHECK_FALSE(cc.unique_on_circle);
  CHECK(cc.witness.find("(e)") != std::string::npos);
}

TEST_CASE("reducible block matrix fails uniqueness") {
  Eigen::MatrixXd M = Eigen::MatrixXd::Zero(4, 4);
  M.topLeftCorner(2, 2) = oracles::random_positive_matrix(2, 31);
  M.bottomRightCorner(2, 2) = 0.5 * oracles::random_positive_matrix(2, 32);
  const DiscreteOperator op = oracles::wrap_matrix(M);
  const SpectrumReport rep = full_spectrum_oracle(op);
  CHECK(rep.positive_eigenvector_count >= 2);
  const ConclusionCheck cc = verify_theorem_conclusions(op, dominant_eigenpair(op));
  CHECK_FALSE(cc.all_pass);
  CHECK_FALSE(cc.unique_positive_eigenvector);
}

TEST_CASE("all conclusions hold for a strictly positive matrix") {
  const DiscreteOperator op =
      oracles::wrap_matrix(oracles::random_positive_matrix(10, 41));
  const ConclusionCheck cc = verify_theorem_conclusions(op, dominant_eigenpair(op));
  CHECK(cc.rho_is_spectral_radius);
  CHECK(cc.unique_positive_eigenvector);
  CHECK(cc.simple);
  CHECK(cc.isolated);
  CHECK(cc.unique_on_circle);
  CHECK(cc.all_pass);
  CHECK(cc.witness.empty());
}

TEST_CASE("dense oracle refuses oversized operators") {
  const DiscreteOperator op =
      oracles::wrap_matrix(oracles::random_positive_matrix(20, 51));
  OracleOptions opts;
  opts.dense_limit = 10;
  CHECK_THROWS_AS(full_spectrum_oracle(op, opts), TooLarge);
}

TEST_CASE("solver failure modes") {
  const DiscreteOperator op =
      oracles::wrap_matrix(oracles::random_positive_matrix(6, 61));
  SolverOptions opts;
  opts.max_iter = 1;
  opts.tol = 1e-15;
  CHECK_THROWS_AS(dominant_eigenpair(op, opts), NoConvergence);

  DiscreteOperator rect = op;
  rect.matrix = Eigen::MatrixXd::Ones(6, 5);
  CHECK_THROWS_AS(dominant_eigenpair(rect), DimensionMismatch);

  DiscreteOperator neg = op;
  neg.matrix(0, 0) = -1.0;
  CHECK_THROWS_AS(dominant_eigenpair(neg), Error);
}

TEST_CASE("zero column keeps the iterate on the boundary") {
  // Column 0 of M is zero, so the converged iterate vanishes there.
  Eigen::MatrixXd M = oracles::random_positive_matrix(3, 71);
  M.col(0).setZero();
  CHECK_THROWS_AS(dominant_eigenpair(oracles::wrap_matrix(M)),
                  NonPositiveIterate);
}
