#pragma once

#include <Eigen/Dense>
#include <functional>
#include <optional>
#include <string>
#include <variant>

#include "perron/statemodels.hpp"

namespace perron {

// One-period SDF m(x, x', y). The auxiliary shock y enters only when a
// shock law is attached; otherwise m is evaluated at y = 0.
struct SDFSpec {
  std::function<double(const Eigen::VectorXd&, const Eigen::VectorXd&, double)> m;
  // Maps (x, x', standard normal z) to a draw of Y'. Absent -> m ignores y.
  std::optional<std::function<double(const Eigen::VectorXd&,
                                     const Eigen::VectorXd&, double)>>
      shock_law;
  std::string name = "custom";

  static SDFSpec unit();
  static SDFSpec constant(double beta);
  static SDFSpec ccapm(double beta, double gamma,
                       std::function<double(const Eigen::VectorXd&,
                                            const Eigen::VectorXd&, double)>
                           growth);
};

// Nystrom-type discretization: entry (i,j) already carries the quadrature
// weight, so (T f)_i = sum_j matrix(i,j) f_j.
struct DiscreteOperator {
  Grid grid;
  Eigen::MatrixXd matrix;
  std::string label;
  long long clamp_warnings = 0;  // off-hull interpolation clamps during build
};

struct BuildOptions {
  int innovation_quadrature = 96;  // nodes for the 1-D innovation integral
  int mc_draws = 4096;             // inner expectation over Y' (antithetic)
  std::uint64_t mc_seed = 0xd11cULL;
};

DiscreteOperator build_pricing_operator(const StateModel& model,
                                        const SDFSpec& sdf, const Grid& grid,
                                        const BuildOptions& opts = {});

Eigen::VectorXd apply(const DiscreteOperator& op, const Eigen::VectorXd& f);

DiscreteOperator compose_n(const DiscreteOperator& op, long long n);

DiscreteOperator adjoint(const DiscreteOperator& op);

// Hilbert-Schmidt integral of the `steps`-period kernel against Q x Q.
// Degenerate when the conditional density at that horizon does not exist
// (stacked state, steps < ell).
struct DegenerateFlag {
  int deterministic_dims = 0;
};
using HSResult = std::variant<double, DegenerateFlag>;

HSResult hs_integral(const StateModel& model, const SDFSpec& sdf,
                     const Grid& grid, int steps,
                     const BuildOptions& opts = {});

// Same integral evaluated directly from an already-built operator matrix.
double hs_from_operator(const DiscreteOperator& op, int steps);

}  // namespace perron
