#include "perron/pricing.hpp"

#include <algorithm>
#include <cmath>

#include "perron/errors.hpp"

namespace perron {

YieldCurve yield_curve(const DiscreteOperator& op, int n_max) {
  if (n_max < 1) throw Error("yield_curve requires n_max >= 1");
  if (op.matrix.minCoeff() < -1e-14) throw Error("operator not positive");
  const Eigen::Index n = op.matrix.rows();
  YieldCurve yc;
  yc.prices.resize(n_max, n);
  yc.yields.resize(n_max, n);
  Eigen::VectorXd price = Eigen::VectorXd::Ones(n);
  for (int h = 1; h <= n_max; ++h) {
    price = op.matrix * price;
    if (price.minCoeff() <= 0.0)
      throw ZeroBondPrice("bond price vanished at horizon " + std::to_string(h));
    yc.horizons.push_back(h);
    yc.prices.row(h - 1) = price;
    for (Eigen::Index i = 0; i < n; ++i)
      yc.yields(h - 1, i) = std::pow(price(i), -1.0 / h) - 1.0;
  }
  return yc;
}

Eigen::VectorXd long_run_limit_check(const DiscreteOperator& op,
                                     const Eigenpair& pair,
                                     const Eigen::VectorXd& psi, int n_max) {
  if (psi.size() != op.matrix.cols())
    throw DimensionMismatch("psi length mismatch");
  const Eigen::VectorXd& w = op.grid.weights;
  const double constant = weighted_inner(w, psi, pair.phi_star);
  const Eigen::VectorXd target = constant * pair.phi;
  Eigen::VectorXd v = psi;
  Eigen::VectorXd errs(n_max);
  for (int n = 1; n <= n_max; ++n) {
    v = (op.matrix * v) / pair.rho;
    errs(n - 1) = weighted_norm(w, v - target);
  }
  return errs;
}

Decomposition decompose(const DiscreteOperator& op, const Eigenpair& pair,
                        const OracleOptions& oracle) {
  const Eigen::Index n = op.matrix.rows();
  Decomposition dec;
  dec.eigenpair = pair;
  dec.twisted_kernel.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i)
    for (Eigen::Index j = 0; j < n; ++j)
      dec.twisted_kernel(i, j) =
          op.matrix(i, j) * pair.phi(j) / (pair.rho * pair.phi(i));
  for (Eigen::Index i = 0; i < n; ++i) {
    const double rowsum = dec.twisted_kernel.row(i).sum();
    if (std::abs(rowsum - 1.0) > 1e-8)
      throw NonStochasticKernel(
          "twisted kernel row sum off by " + std::to_string(rowsum - 1.0) +
          "; eigenpair residual too large");
  }

  // Left Perron vector of the twisted kernel via the dense oracle.
  if (n > oracle.dense_limit)
    throw TooLarge("twisted kernel exceeds the dense oracle limit");
  Eigen::EigenSolver<Eigen::MatrixXd> es(dec.twisted_kernel.transpose());
  Eigen::Index best = 0;
  double best_dist = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < n; ++i) {
    const double d = std::abs(es.eigenvalues()(i) - std::complex<double>(1, 0));
    if (d < best_dist) {
      best_dist = d;
      best = i;
    }
  }
  Eigen::VectorXd pi = es.eigenvectors().col(best).real();
  if (pi.sum() < 0) pi = -pi;
  pi = pi.cwiseMax(0.0);
  dec.pi_tilde = pi / pi.sum();

  const Eigen::VectorXd x1 = op.grid.points.col(0);
  std::vector<double> sorted(x1.data(), x1.data() + x1.size());
  std::nth_element(sorted.begin(), sorted.begin() + sorted.size() / 2,
                   sorted.end());
  const double median = sorted[sorted.size() / 2];
  auto constant_for = [&](const Eigen::VectorXd& psi) {
    return weighted_inner(op.grid.weights, psi, pair.phi_star);
  };
  dec.battery_names = {"one", "x", "x_squared", "upper_half", "lower_half"};
  Eigen::VectorXd ones = Eigen::VectorXd::Ones(n);
  Eigen::VectorXd upper(n), lower(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    upper(i) = x1(i) >= median ? 1.0 : 0.0;
    lower(i) = 1.0 - upper(i);
  }
  dec.long_run_constants = {constant_for(ones), constant_for(x1),
                            constant_for(x1.cwiseProduct(x1)),
                            constant_for(upper), constant_for(lower)};
  return dec;
}

PathDecomposition decompose_along_path(const SDFSpec& sdf,
                                       const StateModel& model,
                                       const Eigenpair& pair, const Grid& grid,
                                       const PathSample& path) {
  validate(model);
  if (path.states.size() != path.shocks.size() + 1)
    throw Error("malformed path sample");
  PathDecomposition out;
  const std::size_t steps = path.shocks.size();
  out.sdf.reserve(steps);
  out.transitory.reserve(steps);
  out.permanent.reserve(steps);

  auto phi_at = [&](const Eigen::VectorXd& x) {
    bool clamped = false;
    const double v = interp_value(grid, pair.phi, x, &clamped);
    if (clamped) ++out.off_grid_clamps;
    if (!(v > 0.0)) throw PathOffGrid("interpolated phi is not positive");
    return v;
  };

  for (std::size_t t = 0; t < steps; ++t) {
    const auto& x = path.states[t];
    const auto& xp = path.states[t + 1];
    const double y =
        sdf.shock_law ? (*sdf.shock_law)(x, xp, path.shocks[t]) : 0.0;
    const double m = sdf.m(x, xp, y);
    const double phi_t = phi_at(x);
    const double phi_tp = phi_at(xp);
    out.sdf.push_back(m);
    out.transitory.push_back(pair.rho * phi_t / phi_tp);
    out.permanent.push_back(m * phi_tp / (pair.rho * phi_t));
  }
  return out;
}

}  // namespace perron
