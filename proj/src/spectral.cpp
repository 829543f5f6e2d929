#include "perron/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "perron/errors.hpp"
#include "perron/rng.hpp"

namespace perron {

double weighted_inner(const Eigen::VectorXd& w, const Eigen::VectorXd& f,
                      const Eigen::VectorXd& g) {
  return (w.array() * f.array() * g.array()).sum();
}

double weighted_norm(const Eigen::VectorXd& w, const Eigen::VectorXd& f) {
  return std::sqrt(std::max(0.0, weighted_inner(w, f, f)));
}

namespace {

// Power iteration with weighted Rayleigh quotient. Returns (rho, vector,
// residual); start must be nonzero.
struct PowerResult {
  double rho = 0.0;
  Eigen::VectorXd v;
  double residual = 0.0;
};

PowerResult power_iterate(const Eigen::MatrixXd& M, const Eigen::VectorXd& w,
                          Eigen::VectorXd v, const SolverOptions& opts) {
  v /= weighted_norm(w, v);
  PowerResult out;
  for (long long it = 0; it < opts.max_iter; ++it) {
    const Eigen::VectorXd u = M * v;
    const double rho = weighted_inner(w, v, u);
    const double res = weighted_norm(w, u - rho * v);
    if (res <= opts.tol * std::max(1.0, std::abs(rho))) {
      out.rho = rho;
      out.v = v;
      out.residual = res;
      return out;
    }
    const double nu = weighted_norm(w, u);
    if (!(nu > 0.0)) throw NoConvergence("iterate collapsed to zero");
    v = u / nu;
  }
  throw NoConvergence("power iteration did not converge; gap may be ~0");
}

// |lambda_2| from deflated power iteration: growth rate of the norm under
// M - rho * phi <phi*, .>.
double second_modulus_estimate(const Eigen::MatrixXd& M,
                               const Eigen::VectorXd& w, const Eigenpair& pair,
                               const SolverOptions& opts) {
  const Eigen::VectorXd left = pair.phi_star.cwiseProduct(w);
  Rng rng(opts.gap_seed);
  Eigen::VectorXd v(M.rows());
  for (Eigen::Index i = 0; i < v.size(); ++i) v(i) = rng.normal();
  auto deflate = [&](const Eigen::VectorXd& f) -> Eigen::VectorXd {
    return f - pair.phi * left.dot(f);
  };
  v = deflate(v);
  double nrm = weighted_norm(w, v);
  if (!(nrm > 0.0)) return 0.0;
  v /= nrm;
  double log_acc = 0.0;
  int counted = 0;
  const int warmup = opts.gap_iters / 2;
  for (int it = 0; it < opts.gap_iters; ++it) {
    v = deflate(M * v);
    nrm = weighted_norm(w, v);
    if (nrm < 1e-290) return 0.0;
    if (it >= warmup) {
      log_acc += std::log(nrm);
      ++counted;
    }
    v /= nrm;
  }
  return counted > 0 ? std::exp(log_acc / counted) : 0.0;
}

}  // namespace

Eigenpair dominant_eigenpair(const DiscreteOperator& op,
                             const SolverOptions& opts) {
  if (op.matrix.rows() != op.matrix.cols())
    throw DimensionMismatch("operator matrix must be square");
  if (op.matrix.minCoeff() < -1e-14)
    throw Error("operator has negative entries; run check_positivity first");
  if (!(opts.tol > 0.0)) throw Error("tol must be positive");
  const Eigen::VectorXd& w = op.grid.weights;

  Eigenpair pair;
  PowerResult right =
      power_iterate(op.matrix, w, Eigen::VectorXd::Ones(op.matrix.rows()), opts);
  if (right.v.minCoeff() <= 0.0)
    throw NonPositiveIterate(
        "converged iterate is not strictly positive; eventual strong "
        "positivity may fail");
  pair.rho = right.rho;
  pair.phi = right.v;  // already unit weighted norm
  pair.residual = right.residual;
  if (!(pair.rho > 0.0)) throw Error("dominant eigenvalue is not positive");

  const DiscreteOperator adj = adjoint(op);
  PowerResult left =
      power_iterate(adj.matrix, w, Eigen::VectorXd::Ones(op.matrix.rows()), opts);
  if (left.v.minCoeff() <= 0.0)
    throw NonPositiveIterate("adjoint iterate is not strictly positive");
  pair.phi_star = left.v / weighted_inner(w, pair.phi, left.v);

  const double second = second_modulus_estimate(op.matrix, w, pair, opts);
  pair.gap = std::min(second / pair.rho, 1.0 - 1e-15);
  return pair;
}

SpectrumReport full_spectrum_oracle(const DiscreteOperator& op,
                                    const OracleOptions& opts) {
  const Eigen::Index n = op.matrix.rows();
  if (n > opts.dense_limit)
    throw TooLarge("operator exceeds the dense oracle limit");
  Eigen::EigenSolver<Eigen::MatrixXd> es(op.matrix);
  SpectrumReport rep;
  rep.eigenvalues.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) rep.eigenvalues[i] = es.eigenvalues()(i);

  double r = 0.0;
  for (const auto& ev : rep.eigenvalues) r = std::max(r, std::abs(ev));
  rep.spectral_radius = r;
  const double tol = opts.rel_tol * std::max(r, 1e-300);

  // Dominant eigenvalue: among max-modulus eigenvalues prefer the one with
  // the largest real part (the candidate Perron root).
  std::complex<double> dom = rep.eigenvalues[0];
  for (const auto& ev : rep.eigenvalues) {
    if (std::abs(ev) > std::abs(dom) + tol ||
        (std::abs(std::abs(ev) - std::abs(dom)) <= tol && ev.real() > dom.real()))
      dom = ev;
  }

  int mult = 0;
  double min_dist = std::numeric_limits<double>::infinity();
  for (const auto& ev : rep.eigenvalues) {
    if (std::abs(ev - dom) <= tol) {
      ++mult;
    } else {
      min_dist = std::min(min_dist, std::abs(ev - dom));
    }
    if (std::abs(std::abs(ev) - r) <= tol) ++rep.on_circle_count;
  }
  rep.is_simple = (mult == 1);
  rep.is_isolated = (mult == 1) && (n == 1 || min_dist > tol);

  std::vector<double> moduli;
  moduli.reserve(n);
  for (const auto& ev : rep.eigenvalues) moduli.push_back(std::abs(ev));
  std::sort(moduli.rbegin(), moduli.rend());
  rep.second_modulus = n > 1 ? moduli[1] : 0.0;

  // Census of real eigenvectors with no sign change.
  for (Eigen::Index i = 0; i < n; ++i) {
    if (std::abs(es.eigenvalues()(i).imag()) > tol) continue;
    Eigen::VectorXd v = es.eigenvectors().col(i).real();
    const double scale = v.cwiseAbs().maxCoeff();
    if (!(scale > 0.0)) continue;
    if (v.sum() < 0.0) v = -v;
    if (v.minCoeff() >= -opts.rel_tol * scale) ++rep.positive_eigenvector_count;
  }
  return rep;
}

ConclusionCheck verify_theorem_conclusions(const DiscreteOperator& op,
                                           const Eigenpair& pair,
                                           const OracleOptions& opts) {
  ConclusionCheck chk;
  std::ostringstream witness;
  const SpectrumReport rep = full_spectrum_oracle(op, opts);

  chk.rho_is_spectral_radius =
      std::abs(pair.rho - rep.spectral_radius) <=
      1e-8 * std::max(rep.spectral_radius, 1e-300);
  if (!chk.rho_is_spectral_radius)
    witness << "(a) rho=" << pair.rho << " vs r(T)=" << rep.spectral_radius
            << "; ";

  bool adj_unique = false;
  try {
    const SpectrumReport adj_rep = full_spectrum_oracle(adjoint(op), opts);
    adj_unique = (adj_rep.positive_eigenvector_count == 1);
  } catch (const ZeroWeight&) {
    witness << "(b) adjoint unavailable (zero weight); ";
  }
  chk.unique_positive_eigenvector =
      (rep.positive_eigenvector_count == 1) && adj_unique;
  if (!chk.unique_positive_eigenvector)
    witness << "(b) nonnegative eigenvector count T=" << rep.positive_eigenvector_count
            << "; ";

  // Algebraic multiplicity one plus rank deficiency exactly one.
  bool rank_ok = false;
  if (rep.is_simple) {
    const Eigen::Index n = op.matrix.rows();
    Eigen::MatrixXd shifted =
        op.matrix - rep.spectral_radius * Eigen::MatrixXd::Identity(n, n);
    Eigen::CompleteOrthogonalDecomposition<Eigen::MatrixXd> cod(shifted);
    cod.setThreshold(1e-10);
    rank_ok = (cod.rank() == n - 1);
  }
  chk.simple = rep.is_simple && rank_ok;
  if (!chk.simple) witness << "(c) eigenvalue not simple; ";

  chk.isolated = rep.is_isolated;
  if (!chk.isolated) witness << "(d) eigenvalue not isolated; ";

  chk.unique_on_circle = (rep.on_circle_count == 1);
  if (!chk.unique_on_circle)
    witness << "(e) " << rep.on_circle_count << " eigenvalues on |z|=r(T); ";

  chk.all_pass = chk.rho_is_spectral_radius && chk.unique_positive_eigenvector &&
                 chk.simple && chk.isolated && chk.unique_on_circle;
  chk.witness = witness.str();
  return chk;
}

}  // namespace perron
