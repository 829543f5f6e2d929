#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "perron/rng.hpp"

namespace perron {

// Innovation law of a (possibly nonlinear) AR process. Everywhere-positive
// density. Sampling goes through the inverse CDF so that paths are
// reproducible from raw uniforms; the Gaussian case short-circuits to the
// Box-Muller draw.
struct InnovationLaw {
  double sd = 1.0;
  bool gaussian = true;
  std::function<double(double)> pdf;       // density on R, > 0 everywhere
  std::function<double(double)> quantile;  // required when !gaussian

  static InnovationLaw normal(double sd);
  static InnovationLaw logistic(double scale);

  double sample(Rng& rng) const;
};

struct DiscreteChain {
  Eigen::MatrixXd transition;     // row-stochastic
  Eigen::VectorXd state_values;   // empty -> 0..n-1
};

struct GaussianAR1 {
  double a = 0.0;      // persistence, |a| < 1
  double sigma = 1.0;  // innovation std
};

// Order-ell nonlinear AR stacked into a first-order state
// X_t = (W_t, ..., W_{t-ell+1}).
struct StackedNAR {
  int order = 1;
  std::function<double(const Eigen::VectorXd&)> mean_fn;  // h : R^ell -> R
  InnovationLaw innovation;
};

// Ornstein-Uhlenbeck process observed on the grid {0, tau, 2 tau, ...}.
struct OUSkeleton {
  double kappa = 1.0;
  double sigma = 1.0;
  double tau = 1.0;

  GaussianAR1 sampled_ar1() const;  // exact discretization at interval tau
};

using StateModel = std::variant<DiscreteChain, GaussianAR1, StackedNAR, OUSkeleton>;

int state_dim(const StateModel& model);
void validate(const StateModel& model);  // throws InvalidModel / NonStationaryModel

struct Grid {
  Eigen::MatrixXd points;   // n x d
  Eigen::VectorXd weights;  // n, >= 0, sums to 1
  // Per-dimension axes when the grid is a tensor product (row-major
  // ordering, axis 0 slowest); empty for unstructured grids.
  std::vector<Eigen::VectorXd> axes;

  Eigen::Index size() const { return points.rows(); }
  Eigen::Index dim() const { return points.cols(); }
};

struct PathSample {
  std::vector<Eigen::VectorXd> states;  // length + 1 entries
  std::vector<double> shocks;           // standard-normal auxiliary draws Y_t
  std::uint64_t seed = 0;
};

struct GridOptions {
  double truncation_sd = 8.0;        // drop nodes beyond this many stationary sds
  long long sim_length = 1'000'000;  // StackedNAR stationary-law simulation
  long long burn_in = 10'000;
  std::uint64_t sim_seed = 0x5eedULL;  // fixed: grid construction is deterministic
  double weight_floor = 1e-12;         // relative to uniform, applied after scatter
};

Grid stationary_grid(const StateModel& model, int n_points,
                     const GridOptions& opts = {});

// Stationary draws of the stacked state, one row per time step, produced
// by the same seeded simulation that backs the stacked grid weights.
Eigen::MatrixXd stacked_stationary_sample(const StackedNAR& model,
                                          const GridOptions& opts = {});

// One-step transition description. When degenerate (stacked state with
// ell > 1) only the first coordinate is stochastic with density
// f_U(w' - h(x)); the remaining coordinates shift deterministically.
struct TransitionStructure {
  bool degenerate = false;
  int stochastic_dims = 1;
  int deterministic_dims = 0;
  // Joint density f(x'|x); only valid when !degenerate.
  std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&)> density;
  // Density of the stochastic first coordinate given x (stacked models).
  std::function<double(const Eigen::VectorXd&, double)> first_coord_density;
};

TransitionStructure transition_structure(const StateModel& model);

PathSample simulate_path(const StateModel& model, std::uint64_t seed,
                         long long length);

// Shift map for stacked states: x' = (w_new, x_0, ..., x_{ell-2}).
Eigen::VectorXd stacked_shift(const Eigen::VectorXd& x, double w_new);

// Stationary std of the AR(1) in a model, where defined.
double ar1_stationary_sd(const GaussianAR1& m);

// Multilinear interpolation stencil on a tensor grid. Query points outside
// the hull are clamped; the caller may count clamps via the flag.
struct InterpStencil {
  // (flat grid index, weight) pairs; weights sum to 1.
  std::vector<std::pair<Eigen::Index, double>> terms;
  bool clamped = false;
};

InterpStencil interp_stencil(const Grid& grid, const Eigen::VectorXd& x);

double interp_value(const Grid& grid, const Eigen::VectorXd& f_on_grid,
                    const Eigen::VectorXd& x, bool* clamped = nullptr);

}  // namespace perron
