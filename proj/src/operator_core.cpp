#include "perron/operator_core.hpp"

#include <cmath>

#include "perron/errors.hpp"
#include "perron/quadrature.hpp"
#include "perron/rng.hpp"

namespace perron {

namespace {

constexpr double kPi = 3.14159265358979323846;

double gaussian_pdf(double z, double sigma) {
  const double t = z / sigma;
  return std::exp(-0.5 * t * t) / (sigma * std::sqrt(2.0 * kPi));
}

// Inner expectation of m over Y' given (x, x'). Antithetic standard-normal
// draws; deterministic per (row, column) stream.
double sdf_mean(const SDFSpec& sdf, const Eigen::VectorXd& x,
                const Eigen::VectorXd& xp, const BuildOptions& opts,
                std::uint64_t stream) {
  auto check = [](double v) {
    if (v < 0.0) throw NegativeSDF("sampled SDF value is negative");
    return v;
  };
  if (!sdf.shock_law) return check(sdf.m(x, xp, 0.0));
  Rng rng(child_seed(opts.mc_seed, stream));
  const int pairs = std::max(1, opts.mc_draws / 2);
  double acc = 0.0;
  for (int k = 0; k < pairs; ++k) {
    const double z = rng.normal();
    acc += check(sdf.m(x, xp, (*sdf.shock_law)(x, xp, z)));
    acc += check(sdf.m(x, xp, (*sdf.shock_law)(x, xp, -z)));
  }
  return acc / (2.0 * pairs);
}

// Quadrature rule for integrals against the innovation density.
QuadRule innovation_rule(const InnovationLaw& law, int n) {
  if (law.gaussian) {
    QuadRule rule = gauss_hermite_normal(n);
    rule.nodes *= law.sd;
    return rule;
  }
  QuadRule unit = gauss_legendre_unit(n);
  QuadRule rule;
  rule.nodes.resize(n);
  rule.weights = unit.weights;
  for (int i = 0; i < n; ++i) rule.nodes(i) = law.quantile(unit.nodes(i));
  return rule;
}

// Direct Hilbert-Schmidt norm of the order-step kernel of a stacked model.
// At exactly `order` steps the intermediate states are deterministic
// functions of the endpoints, so the kernel factors into innovation
// densities and per-step SDF means without any matrix composition.  The
// stationary density in the denominator is a smooth product-kernel KDE over
// the seeded simulation, floored by a moment-matched Gaussian so tail nodes
// never divide by a vanishing estimate.
double hs_stacked_exact(const StackedNAR& snar, const SDFSpec& sdf,
                        const Grid& grid, const BuildOptions& opts) {
  const int ell = snar.order;
  const Eigen::Index n = grid.size();
  if (grid.weights.minCoeff() <= 0.0)
    throw ZeroWeight("HS integral needs positive weights");

  const Eigen::MatrixXd sample = stacked_stationary_sample(snar);
  const Eigen::Index stride = std::max<Eigen::Index>(1, sample.rows() / 10000);
  const Eigen::Index ns = (sample.rows() + stride - 1) / stride;
  Eigen::MatrixXd sub(ns, ell);
  for (Eigen::Index s = 0, r = 0; r < ns; s += stride, ++r)
    sub.row(r) = sample.row(s);
  const Eigen::VectorXd mu = sub.colwise().mean();
  const Eigen::MatrixXd centered = sub.rowwise() - mu.transpose();
  const Eigen::MatrixXd cov =
      centered.transpose() * centered / static_cast<double>(ns);
  Eigen::LLT<Eigen::MatrixXd> llt(cov);
  if (llt.info() != Eigen::Success)
    throw Error("HS integral: singular stationary covariance");
  double log_det_l = 0.0;
  const Eigen::MatrixXd lmat = llt.matrixL();
  for (int k = 0; k < ell; ++k) log_det_l += std::log(lmat(k, k));

  const double bw_factor =
      std::pow(4.0 / ((ell + 2.0) * static_cast<double>(ns)), 1.0 / (ell + 4.0));
  Eigen::VectorXd bw(ell);
  for (int k = 0; k < ell; ++k) bw(k) = std::sqrt(cov(k, k)) * bw_factor;

  // Tensor-cell volumes from axis midpoints; cell mass q * volume replaces
  // the histogram weights so numerator and denominator use one density and
  // floored never-visited corner cells cannot dominate the sum.
  std::vector<Eigen::VectorXd> axis_dx(ell);
  for (int k = 0; k < ell; ++k) {
    const Eigen::VectorXd& ax = grid.axes[k];
    const Eigen::Index m = ax.size();
    axis_dx[k].resize(m);
    for (Eigen::Index a = 0; a < m; ++a) {
      const double lo = a == 0 ? ax(0) : 0.5 * (ax(a - 1) + ax(a));
      const double hi = a + 1 == m ? ax(m - 1) : 0.5 * (ax(a) + ax(a + 1));
      axis_dx[k](a) = hi - lo;
    }
  }
  auto cell_volume = [&](Eigen::Index flat) {
    double vol = 1.0;
    for (int k = ell - 1; k >= 0; --k) {
      const Eigen::Index m = grid.axes[k].size();
      vol *= axis_dx[k](flat % m);
      flat /= m;
    }
    return vol;
  };

  Eigen::VectorXd q(n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const Eigen::VectorXd x = grid.points.row(j);
    double kde = 0.0;
    for (Eigen::Index r = 0; r < ns; ++r) {
      double prod = 1.0;
      for (int k = 0; k < ell; ++k)
        prod *= gaussian_pdf(x(k) - sub(r, k), bw(k));
      kde += prod;
    }
    kde /= static_cast<double>(ns);
    const Eigen::VectorXd z =
        lmat.triangularView<Eigen::Lower>().solve(x - mu);
    const double gauss = std::exp(-0.5 * z.squaredNorm() - log_det_l -
                                  0.5 * ell * std::log(2.0 * kPi));
    q(j) = std::max(kde, gauss);
  }
  Eigen::VectorXd mass(n);
  for (Eigen::Index j = 0; j < n; ++j) mass(j) = q(j) * cell_volume(j);
  mass /= mass.sum();

  double acc = 0.0;
  Eigen::VectorXd v(2 * ell);
  for (Eigen::Index i = 0; i < n; ++i) {
    v.tail(ell) = grid.points.row(i);
    for (Eigen::Index j = 0; j < n; ++j) {
      v.head(ell) = grid.points.row(j);
      double kernel = 1.0;
      for (int s = 1; s <= ell; ++s) {
        const Eigen::VectorXd xprev = v.segment(ell - s + 1, ell);
        const Eigen::VectorXd xnext = v.segment(ell - s, ell);
        const double u = v(ell - s) - snar.mean_fn(xprev);
        kernel *= snar.innovation.pdf(u) *
                  sdf_mean(sdf, xprev, xnext, opts,
                           static_cast<std::uint64_t>((i * n + j) * ell + s));
      }
      kernel /= q(j);
      acc += mass(i) * mass(j) * kernel * kernel;
    }
  }
  return acc;
}

}  // namespace

SDFSpec SDFSpec::unit() {
  SDFSpec s;
  s.m = [](const Eigen::VectorXd&, const Eigen::VectorXd&, double) {
    return 1.0;
  };
  s.name = "unit";
  return s;
}

SDFSpec SDFSpec::constant(double beta) {
  SDFSpec s;
  s.m = [beta](const Eigen::VectorXd&, const Eigen::VectorXd&, double) {
    return beta;
  };
  s.name = "constant";
  return s;
}

SDFSpec SDFSpec::ccapm(double beta, double gamma,
                       std::function<double(const Eigen::VectorXd&,
                                            const Eigen::VectorXd&, double)>
                           growth) {
  SDFSpec s;
  s.m = [beta, gamma, growth](const Eigen::VectorXd& x,
                              const Eigen::VectorXd& xp, double y) {
    return beta * std::exp(-gamma * growth(x, xp, y));
  };
  s.name = "ccapm";
  return s;
}

DiscreteOperator build_pricing_operator(const StateModel& model,
                                        const SDFSpec& sdf, const Grid& grid,
                                        const BuildOptions& opts) {
  validate(model);
  if (!sdf.m) throw Error("SDF not evaluable");
  const Eigen::Index n = grid.size();
  DiscreteOperator op;
  op.grid = grid;
  op.matrix.setZero(n, n);
  op.label = "T[" + sdf.name + "]";
  const TransitionStructure ts = transition_structure(model);

  if (!ts.degenerate && !std::holds_alternative<StackedNAR>(model)) {
    // Kernel route: matrix(i,j) = E[m|x_i,x_j] f(x_j|x_i) / q(x_j) * w_j,
    // with q the implied density of the weights. For a chain the weight
    // and the density atom cancel, leaving m * P_ij.
    const bool chain = std::holds_alternative<DiscreteChain>(model);
    Eigen::VectorXd q(n);
    if (!chain) {
      // Stationary density at the nodes; exact for the Gaussian families.
      GaussianAR1 ar1;
      if (const auto* g = std::get_if<GaussianAR1>(&model)) ar1 = *g;
      if (const auto* ou = std::get_if<OUSkeleton>(&model))
        ar1 = ou->sampled_ar1();
      const double s = ar1_stationary_sd(ar1);
      for (Eigen::Index j = 0; j < n; ++j)
        q(j) = gaussian_pdf(grid.points(j, 0), s);
    }
    for (Eigen::Index i = 0; i < n; ++i) {
      const Eigen::VectorXd xi = grid.points.row(i);
      for (Eigen::Index j = 0; j < n; ++j) {
        const Eigen::VectorXd xj = grid.points.row(j);
        const double mbar =
            sdf_mean(sdf, xi, xj, opts, static_cast<std::uint64_t>(i * n + j));
        const double dens = ts.density(xi, xj);
        op.matrix(i, j) =
            chain ? mbar * dens : mbar * dens / q(j) * grid.weights(j);
      }
    }
    return op;
  }

  // Stacked route (any order, including 1): exact coordinate shift plus
  // 1-D quadrature over the innovation, projected back to the tensor grid
  // by multilinear interpolation.
  const auto& snar = std::get<StackedNAR>(model);
  const QuadRule rule = innovation_rule(snar.innovation, opts.innovation_quadrature);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Eigen::VectorXd xi = grid.points.row(i);
    const double hx = snar.mean_fn(xi);
    for (int qk = 0; qk < rule.nodes.size(); ++qk) {
      const Eigen::VectorXd xp = stacked_shift(xi, hx + rule.nodes(qk));
      const double mbar = sdf_mean(
          sdf, xi, xp, opts,
          static_cast<std::uint64_t>(i * rule.nodes.size() + qk));
      const InterpStencil st = interp_stencil(op.grid, xp);
      if (st.clamped) ++op.clamp_warnings;
      for (const auto& [idx, w] : st.terms)
        op.matrix(i, idx) += rule.weights(qk) * mbar * w;
    }
  }
  return op;
}

Eigen::VectorXd apply(const DiscreteOperator& op, const Eigen::VectorXd& f) {
  if (f.size() != op.matrix.cols())
    throw DimensionMismatch("apply: grid function length mismatch");
  return op.matrix * f;
}

DiscreteOperator compose_n(const DiscreteOperator& op, long long n) {
  if (n < 1) throw Error("compose_n requires n >= 1");
  DiscreteOperator out = op;
  // Repeated squaring.
  Eigen::MatrixXd base = op.matrix;
  Eigen::MatrixXd acc;
  bool have = false;
  long long k = n;
  while (k > 0) {
    if (k & 1) {
      acc = have ? Eigen::MatrixXd(acc * base) : base;
      have = true;
    }
    k >>= 1;
    if (k > 0) base = base * base;
  }
  out.matrix = acc;
  out.label = op.label + "^" + std::to_string(n);
  return out;
}

DiscreteOperator adjoint(const DiscreteOperator& op) {
  const Eigen::VectorXd& w = op.grid.weights;
  if (w.minCoeff() <= 0.0)
    throw ZeroWeight("adjoint requires strictly positive grid weights");
  DiscreteOperator out = op;
  out.matrix = w.cwiseInverse().asDiagonal() * op.matrix.transpose() *
               w.asDiagonal();
  out.label = op.label + "*";
  return out;
}

double hs_from_operator(const DiscreteOperator& op, int steps) {
  if (steps < 1) throw Error("hs_from_operator requires steps >= 1");
  const Eigen::MatrixXd M = compose_n(op, steps).matrix;
  const Eigen::VectorXd& w = op.grid.weights;
  if (w.minCoeff() <= 0.0) throw ZeroWeight("HS integral needs positive weights");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < M.rows(); ++i)
    for (Eigen::Index j = 0; j < M.cols(); ++j)
      acc += w(i) * M(i, j) * M(i, j) / w(j);
  return acc;
}

HSResult hs_integral(const StateModel& model, const SDFSpec& sdf,
                     const Grid& grid, int steps, const BuildOptions& opts) {
  if (steps < 1) throw Error("hs_integral requires steps >= 1");
  if (const auto* snar = std::get_if<StackedNAR>(&model)) {
    if (steps < snar->order)
      return DegenerateFlag{snar->order - steps};
    if (steps == snar->order)
      return hs_stacked_exact(*snar, sdf, grid, opts);
  }
  const DiscreteOperator op = build_pricing_operator(model, sdf, grid, opts);
  return hs_from_operator(op, steps);
}

}  // namespace perron
