#pragma once

#include <Eigen/Dense>
#include <complex>
#include <string>
#include <vector>

#include "perron/operator_core.hpp"

namespace perron {

// Dominant eigenpair of a positive discrete operator on the weighted grid
// space. phi is normalized to unit L2(Q) norm, phi_star so that
// <phi, phi_star> = 1 in the weighted inner product.
struct Eigenpair {
  double rho = 0.0;
  Eigen::VectorXd phi;
  Eigen::VectorXd phi_star;
  double gap = 0.0;       // |lambda_2| / rho
  double residual = 0.0;  // ||T phi - rho phi|| in the weighted norm
};

struct SolverOptions {
  double tol = 1e-12;
  long long max_iter = 100000;
  int gap_iters = 300;             // deflated iterations for the gap estimate
  std::uint64_t gap_seed = 0x9a9ULL;
};

Eigenpair dominant_eigenpair(const DiscreteOperator& op,
                             const SolverOptions& opts = {});

double weighted_inner(const Eigen::VectorXd& w, const Eigen::VectorXd& f,
                      const Eigen::VectorXd& g);
double weighted_norm(const Eigen::VectorXd& w, const Eigen::VectorXd& f);

// Brute-force dense eigendecomposition report backing the spectral claims.
struct SpectrumReport {
  std::vector<std::complex<double>> eigenvalues;
  int positive_eigenvector_count = 0;  // real eigenvectors with no sign change
  bool is_simple = false;
  bool is_isolated = false;
  int on_circle_count = 0;  // eigenvalues with |lambda| = r within tolerance
  double spectral_radius = 0.0;
  double second_modulus = 0.0;
};

struct OracleOptions {
  Eigen::Index dense_limit = 2000;
  double rel_tol = 1e-8;
};

SpectrumReport full_spectrum_oracle(const DiscreteOperator& op,
                                    const OracleOptions& opts = {});

// The five matrix-level conclusions of the identification theorems.
struct ConclusionCheck {
  bool rho_is_spectral_radius = false;     // (a)
  bool unique_positive_eigenvector = false;  // (b) for T and T*
  bool simple = false;                     // (c)
  bool isolated = false;                   // (d)
  bool unique_on_circle = false;           // (e)
  bool all_pass = false;
  std::string witness;  // populated on violation
};

ConclusionCheck verify_theorem_conclusions(const DiscreteOperator& op,
                                           const Eigenpair& pair,
                                           const OracleOptions& opts = {});

}  // namespace perron
