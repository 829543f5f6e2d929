#include "perron/quadrature.hpp"

#include <cmath>

#include "perron/errors.hpp"

namespace perron {

namespace {

// Golub-Welsch: nodes are eigenvalues of the symmetric Jacobi matrix,
// weights are mu0 * (first eigenvector component)^2.
QuadRule golub_welsch(const Eigen::VectorXd& diag, const Eigen::VectorXd& offdiag,
                      double mu0) {
  const int n = static_cast<int>(diag.size());
  Eigen::MatrixXd jacobi = Eigen::MatrixXd::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    jacobi(i, i) = diag(i);
    if (i + 1 < n) {
      jacobi(i, i + 1) = offdiag(i);
      jacobi(i + 1, i) = offdiag(i);
    }
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(jacobi);
  QuadRule rule;
  rule.nodes = es.eigenvalues();
  rule.weights.resize(n);
  for (int i = 0; i < n; ++i) {
    const double v0 = es.eigenvectors()(0, i);
    rule.weights(i) = mu0 * v0 * v0;
  }
  return rule;
}

}  // namespace

QuadRule gauss_hermite_normal(int n) {
  if (n < 1) throw Error("quadrature order must be >= 1");
  // Probabilists' Hermite recurrence: off-diagonal sqrt(i).
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(n > 1 ? n - 1 : 0);
  for (int i = 1; i < n; ++i) off(i - 1) = std::sqrt(static_cast<double>(i));
  return golub_welsch(diag, off, 1.0);
}

QuadRule gauss_legendre_unit(int n) {
  if (n < 1) throw Error("quadrature order must be >= 1");
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(n > 1 ? n - 1 : 0);
  for (int i = 1; i < n; ++i) {
    const double ii = static_cast<double>(i);
    off(i - 1) = ii / std::sqrt(4.0 * ii * ii - 1.0);
  }
  QuadRule rule = golub_welsch(diag, off, 2.0);
  // Map from (-1, 1) to (0, 1).
  for (int i = 0; i < n; ++i) {
    rule.nodes(i) = 0.5 * (rule.nodes(i) + 1.0);
    rule.weights(i) *= 0.5;
  }
  return rule;
}

}  // namespace perron
