#include "perron/statemodels.hpp"

#include <algorithm>
#include <cmath>

#include "perron/errors.hpp"
#include "perron/quadrature.hpp"

namespace perron {

namespace {

constexpr double kPi = 3.14159265358979323846;

void build_tensor_points(Grid& grid) {
  const int d = static_cast<int>(grid.axes.size());
  Eigen::Index n = 1;
  for (const auto& ax : grid.axes) n *= ax.size();
  grid.points.resize(n, d);
  for (Eigen::Index flat = 0; flat < n; ++flat) {
    Eigen::Index rem = flat;
    for (int k = d - 1; k >= 0; --k) {
      const Eigen::Index nk = grid.axes[k].size();
      grid.points(flat, k) = grid.axes[k](rem % nk);
      rem /= nk;
    }
  }
}

// Left Perron vector of a row-stochastic matrix; throws if the unit
// eigenvalue is not unique.
Eigen::VectorXd chain_stationary(const Eigen::MatrixXd& transition) {
  Eigen::EigenSolver<Eigen::MatrixXd> es(transition.transpose());
  const auto& vals = es.eigenvalues();
  int unit_index = -1;
  int unit_count = 0;
  for (int i = 0; i < vals.size(); ++i) {
    if (std::abs(vals(i) - std::complex<double>(1.0, 0.0)) < 1e-9) {
      ++unit_count;
      unit_index = i;
    }
  }
  if (unit_count != 1)
    throw NonStationaryModel("chain has no unique stationary vector");
  Eigen::VectorXd pi = es.eigenvectors().col(unit_index).real();
  if (pi.sum() < 0) pi = -pi;
  if (pi.minCoeff() < -1e-10)
    throw NonStationaryModel("stationary vector has negative mass");
  pi = pi.cwiseMax(0.0);
  return pi / pi.sum();
}

struct StackedSimStats {
  double mean = 0.0;
  double sd = 1.0;
  std::vector<double> path;  // post burn-in draws of W
};

void explosion_guard(double w, double scale) {
  if (!std::isfinite(w) || std::abs(w) > 1e6 * std::max(scale, 1.0))
    throw NonStationaryModel("stacked AR path exploded; h appears non-stationary");
}

StackedSimStats simulate_stacked_w(const StackedNAR& m, std::uint64_t seed,
                                   long long burn_in, long long length) {
  Rng rng(child_seed(seed, 1));
  Eigen::VectorXd lags = Eigen::VectorXd::Zero(m.order);
  StackedSimStats out;
  out.path.reserve(static_cast<std::size_t>(length));
  double sum = 0.0, sumsq = 0.0;
  for (long long t = 0; t < burn_in + length; ++t) {
    const double w = m.mean_fn(lags) + m.innovation.sample(rng);
    explosion_guard(w, m.innovation.sd);
    for (int k = m.order - 1; k > 0; --k) lags(k) = lags(k - 1);
    lags(0) = w;
    if (t >= burn_in) {
      out.path.push_back(w);
      sum += w;
      sumsq += w * w;
    }
  }
  const double n = static_cast<double>(length);
  out.mean = sum / n;
  out.sd = std::sqrt(std::max(sumsq / n - out.mean * out.mean, 1e-300));
  return out;
}

}  // namespace

InnovationLaw InnovationLaw::normal(double sd) {
  InnovationLaw law;
  law.sd = sd;
  law.gaussian = true;
  law.pdf = [sd](double u) {
    return std::exp(-0.5 * u * u / (sd * sd)) / (sd * std::sqrt(2.0 * kPi));
  };
  return law;
}

InnovationLaw InnovationLaw::logistic(double scale) {
  InnovationLaw law;
  law.sd = scale * kPi / std::sqrt(3.0);
  law.gaussian = false;
  law.pdf = [scale](double u) {
    const double e = std::exp(-std::abs(u) / scale);
    return e / (scale * (1.0 + e) * (1.0 + e));
  };
  law.quantile = [scale](double p) { return scale * std::log(p / (1.0 - p)); };
  return law;
}

double InnovationLaw::sample(Rng& rng) const {
  if (gaussian) return sd * rng.normal();
  return quantile(rng.uniform());
}

GaussianAR1 OUSkeleton::sampled_ar1() const {
  GaussianAR1 ar;
  ar.a = std::exp(-kappa * tau);
  ar.sigma = std::sqrt(sigma * sigma * (1.0 - std::exp(-2.0 * kappa * tau)) /
                       (2.0 * kappa));
  return ar;
}

int state_dim(const StateModel& model) {
  return std::visit(
      [](const auto& m) -> int {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, StackedNAR>) return m.order;
        return 1;
      },
      model);
}

void validate(const StateModel& model) {
  std::visit(
      [](const auto& m) {
        using M = std::decay_t<decltype(m)>;
        if constexpr (std::is_same_v<M, DiscreteChain>) {
          const auto& P = m.transition;
          if (P.rows() < 1 || P.rows() != P.cols())
            throw InvalidModel("transition matrix must be square");
          if (P.minCoeff() < 0.0)
            throw InvalidModel("transition matrix has negative entries");
          for (Eigen::Index i = 0; i < P.rows(); ++i)
            if (std::abs(P.row(i).sum() - 1.0) > 1e-12)
              throw InvalidModel("transition rows must sum to 1");
          if (m.state_values.size() != 0 && m.state_values.size() != P.rows())
            throw InvalidModel("state_values size mismatch");
        } else if constexpr (std::is_same_v<M, GaussianAR1>) {
          if (!(std::abs(m.a) < 1.0))
            throw NonStationaryModel("|a| >= 1");
          if (!(m.sigma > 0.0)) throw InvalidModel("sigma must be positive");
        } else if constexpr (std::is_same_v<M, StackedNAR>) {
          if (m.order < 1) throw InvalidModel("order must be >= 1");
          if (!m.mean_fn) throw InvalidModel("mean function not set");
          if (!m.innovation.pdf) throw InvalidModel("innovation pdf not set");
          if (!(m.innovation.sd > 0.0))
            throw InvalidModel("innovation sd must be positive");
          if (!m.innovation.gaussian && !m.innovation.quantile)
            throw InvalidModel("non-gaussian innovation needs a quantile fn");
        } else if constexpr (std::is_same_v<M, OUSkeleton>) {
          if (!(m.kappa > 0.0)) throw InvalidModel("kappa must be positive");
          if (!(m.sigma > 0.0)) throw InvalidModel("sigma must be positive");
          if (!(m.tau > 0.0)) throw InvalidModel("tau must be positive");
        }
      },
      model);
}

double ar1_stationary_sd(const GaussianAR1& m) {
  return m.sigma / std::sqrt(1.0 - m.a * m.a);
}

Eigen::VectorXd stacked_shift(const Eigen::VectorXd& x, double w_new) {
  Eigen::VectorXd out(x.size());
  out(0) = w_new;
  for (Eigen::Index k = 1; k < x.size(); ++k) out(k) = x(k - 1);
  return out;
}

Grid stationary_grid(const StateModel& model, int n_points,
                     const GridOptions& opts) {
  validate(model);
  if (n_points < 2) throw Error("degenerate grid: n_points < 2");

  Grid grid;
  if (const auto* chain = std::get_if<DiscreteChain>(&model)) {
    const Eigen::Index n = chain->transition.rows();
    if (n < 2) throw Error("degenerate grid: chain has < 2 states");
    grid.points.resize(n, 1);
    for (Eigen::Index i = 0; i < n; ++i)
      grid.points(i, 0) = chain->state_values.size()
                              ? chain->state_values(i)
                              : static_cast<double>(i);
    grid.weights = chain_stationary(chain->transition);
    bool increasing = true;
    for (Eigen::Index i = 1; i < n; ++i)
      if (grid.points(i, 0) <= grid.points(i - 1, 0)) increasing = false;
    if (increasing) grid.axes = {grid.points.col(0)};
    return grid;
  }

  GaussianAR1 ar1;
  if (const auto* g = std::get_if<GaussianAR1>(&model)) ar1 = *g;
  if (const auto* ou = std::get_if<OUSkeleton>(&model)) ar1 = ou->sampled_ar1();
  if (std::holds_alternative<GaussianAR1>(model) ||
      std::holds_alternative<OUSkeleton>(model)) {
    const double s = ar1_stationary_sd(ar1);
    const QuadRule rule = gauss_hermite_normal(n_points);
    std::vector<double> nodes, weights;
    for (int i = 0; i < n_points; ++i) {
      if (std::abs(rule.nodes(i)) > opts.truncation_sd) continue;
      nodes.push_back(s * rule.nodes(i));
      weights.push_back(rule.weights(i));
    }
    const Eigen::Index n = static_cast<Eigen::Index>(nodes.size());
    grid.points.resize(n, 1);
    grid.weights.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      grid.points(i, 0) = nodes[i];
      grid.weights(i) = weights[i];
    }
    grid.weights /= grid.weights.sum();
    grid.axes = {grid.points.col(0)};
    return grid;
  }

  // StackedNAR: no closed-form stationary law. Scale Gauss-Hermite-style
  // axes by the simulated marginal moments, then scatter a long simulated
  // path onto the tensor grid to obtain weights.
  const auto& snar = std::get<StackedNAR>(model);
  const Eigen::MatrixXd sample = stacked_stationary_sample(snar, opts);
  const double mean = sample.col(0).mean();
  const double sd = std::sqrt(
      (sample.col(0).array() - mean).square().mean());
  const QuadRule rule = gauss_hermite_normal(n_points);
  std::vector<double> axis;
  for (int i = 0; i < n_points; ++i) {
    if (std::abs(rule.nodes(i)) > opts.truncation_sd) continue;
    axis.push_back(mean + sd * rule.nodes(i));
  }
  Eigen::VectorXd ax = Eigen::Map<Eigen::VectorXd>(axis.data(), axis.size());
  grid.axes.assign(snar.order, ax);
  build_tensor_points(grid);

  grid.weights = Eigen::VectorXd::Zero(grid.size());
  for (Eigen::Index t = 0; t < sample.rows(); ++t) {
    const InterpStencil st = interp_stencil(grid, sample.row(t));
    for (const auto& [idx, w] : st.terms) grid.weights(idx) += w;
  }
  const double floor = opts.weight_floor / static_cast<double>(grid.size());
  grid.weights = grid.weights.cwiseMax(floor * grid.weights.sum());
  grid.weights /= grid.weights.sum();
  return grid;
}

Eigen::MatrixXd stacked_stationary_sample(const StackedNAR& model,
                                          const GridOptions& opts) {
  const StackedSimStats stats = simulate_stacked_w(
      model, opts.sim_seed, opts.burn_in, opts.sim_length);
  const int ell = model.order;
  const Eigen::Index n =
      static_cast<Eigen::Index>(stats.path.size()) - (ell - 1);
  Eigen::MatrixXd sample(n, ell);
  for (Eigen::Index t = 0; t < n; ++t)
    for (int k = 0; k < ell; ++k)
      sample(t, k) = stats.path[t + ell - 1 - k];
  return sample;
}

TransitionStructure transition_structure(const StateModel& model) {
  validate(model);
  TransitionStructure ts;
  if (const auto* chain = std::get_if<DiscreteChain>(&model)) {
    Eigen::MatrixXd P = chain->transition;
    Eigen::VectorXd values(P.rows());
    for (Eigen::Index i = 0; i < P.rows(); ++i)
      values(i) = chain->state_values.size() ? chain->state_values(i)
                                             : static_cast<double>(i);
    ts.density = [P, values](const Eigen::VectorXd& x,
                             const Eigen::VectorXd& xp) {
      auto locate = [&values](double v) -> Eigen::Index {
        for (Eigen::Index i = 0; i < values.size(); ++i)
          if (std::abs(values(i) - v) < 1e-9) return i;
        throw Error("state value not on chain");
      };
      return P(locate(x(0)), locate(xp(0)));
    };
    return ts;
  }

  GaussianAR1 ar1;
  if (const auto* g = std::get_if<GaussianAR1>(&model)) ar1 = *g;
  if (const auto* ou = std::get_if<OUSkeleton>(&model)) ar1 = ou->sampled_ar1();
  if (std::holds_alternative<GaussianAR1>(model) ||
      std::holds_alternative<OUSkeleton>(model)) {
    const double a = ar1.a, sig = ar1.sigma;
    ts.density = [a, sig](const Eigen::VectorXd& x, const Eigen::VectorXd& xp) {
      const double z = (xp(0) - a * x(0)) / sig;
      return std::exp(-0.5 * z * z) / (sig * std::sqrt(2.0 * kPi));
    };
    return ts;
  }

  const auto& snar = std::get<StackedNAR>(model);
  auto h = snar.mean_fn;
  auto pdf = snar.innovation.pdf;
  ts.first_coord_density = [h, pdf](const Eigen::VectorXd& x, double wp) {
    return pdf(wp - h(x));
  };
  if (snar.order == 1) {
    ts.density = [h, pdf](const Eigen::VectorXd& x, const Eigen::VectorXd& xp) {
      return pdf(xp(0) - h(x));
    };
  } else {
    ts.degenerate = true;
    ts.deterministic_dims = snar.order - 1;
  }
  return ts;
}

PathSample simulate_path(const StateModel& model, std::uint64_t seed,
                         long long length) {
  validate(model);
  if (length < 1) throw Error("path length must be >= 1");
  PathSample out;
  out.seed = seed;
  out.states.reserve(static_cast<std::size_t>(length) + 1);
  out.shocks.reserve(static_cast<std::size_t>(length));
  Rng rng(child_seed(seed, 2));

  if (const auto* chain = std::get_if<DiscreteChain>(&model)) {
    const Eigen::VectorXd pi = chain_stationary(chain->transition);
    auto value = [&](Eigen::Index i) {
      Eigen::VectorXd v(1);
      v(0) = chain->state_values.size() ? chain->state_values(i)
                                        : static_cast<double>(i);
      return v;
    };
    Eigen::Index state = rng.categorical(pi);
    out.states.push_back(value(state));
    for (long long t = 0; t < length; ++t) {
      out.shocks.push_back(rng.normal());
      state = rng.categorical(chain->transition.row(state));
      out.states.push_back(value(state));
    }
    return out;
  }

  if (std::holds_alternative<GaussianAR1>(model) ||
      std::holds_alternative<OUSkeleton>(model)) {
    GaussianAR1 ar1;
    if (const auto* g = std::get_if<GaussianAR1>(&model)) ar1 = *g;
    if (const auto* ou = std::get_if<OUSkeleton>(&model))
      ar1 = ou->sampled_ar1();
    double x = ar1_stationary_sd(ar1) * rng.normal();
    Eigen::VectorXd v(1);
    v(0) = x;
    out.states.push_back(v);
    for (long long t = 0; t < length; ++t) {
      out.shocks.push_back(rng.normal());
      x = ar1.a * x + ar1.sigma * rng.normal();
      v(0) = x;
      out.states.push_back(v);
    }
    return out;
  }

  const auto& snar = std::get<StackedNAR>(model);
  Eigen::VectorXd lags = Eigen::VectorXd::Zero(snar.order);
  // Approximate stationary start by burning in from the origin.
  for (int t = 0; t < 1000; ++t) {
    const double w = snar.mean_fn(lags) + snar.innovation.sample(rng);
    explosion_guard(w, snar.innovation.sd);
    lags = stacked_shift(lags, w);
  }
  out.states.push_back(lags);
  for (long long t = 0; t < length; ++t) {
    out.shocks.push_back(rng.normal());
    const double w = snar.mean_fn(lags) + snar.innovation.sample(rng);
    explosion_guard(w, snar.innovation.sd);
    lags = stacked_shift(lags, w);
    out.states.push_back(lags);
  }
  return out;
}

InterpStencil interp_stencil(const Grid& grid, const Eigen::VectorXd& x) {
  if (grid.axes.empty())
    throw Error("grid has no tensor structure; cannot interpolate");
  const int d = static_cast<int>(grid.axes.size());
  if (x.size() != d) throw DimensionMismatch("interpolation point dimension");

  InterpStencil st;
  std::vector<Eigen::Index> lo(d);
  std::vector<double> frac(d);
  for (int k = 0; k < d; ++k) {
    const auto& ax = grid.axes[k];
    const Eigen::Index nk = ax.size();
    if (x(k) <= ax(0)) {
      lo[k] = 0;
      frac[k] = 0.0;
      if (x(k) < ax(0) - 1e-12) st.clamped = true;
    } else if (x(k) >= ax(nk - 1)) {
      lo[k] = nk - 2;
      frac[k] = 1.0;
      if (x(k) > ax(nk - 1) + 1e-12) st.clamped = true;
    } else {
      Eigen::Index hi = 1;
      while (ax(hi) < x(k)) ++hi;
      lo[k] = hi - 1;
      frac[k] = (x(k) - ax(lo[k])) / (ax(hi) - ax(lo[k]));
    }
  }
  const int corners = 1 << d;
  st.terms.reserve(corners);
  for (int c = 0; c < corners; ++c) {
    double w = 1.0;
    Eigen::Index flat = 0;
    for (int k = 0; k < d; ++k) {
      const bool hi = (c >> k) & 1;
      w *= hi ? frac[k] : (1.0 - frac[k]);
      flat = flat * grid.axes[k].size() + (lo[k] + (hi ? 1 : 0));
    }
    if (w != 0.0) st.terms.emplace_back(flat, w);
  }
  return st;
}

double interp_value(const Grid& grid, const Eigen::VectorXd& f_on_grid,
                    const Eigen::VectorXd& x, bool* clamped) {
  const InterpStencil st = interp_stencil(grid, x);
  if (clamped) *clamped = st.clamped;
  double v = 0.0;
  for (const auto& [idx, w] : st.terms) v += w * f_on_grid(idx);
  return v;
}

}  // namespace perron
