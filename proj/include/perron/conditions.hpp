#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "perron/operator_core.hpp"

namespace perron {

enum class ConditionId {
  Positivity,
  EventualStrongPositivity,
  Irreducibility,
  NoArbitrageSufficient,
  PowerCompactness,
  YieldNonDegeneracy,
  DegenerateTransition,
};

enum class Verdict { Pass, Fail, Inconclusive };

std::string to_string(ConditionId id);
std::string to_string(Verdict v);

struct ConditionReport {
  ConditionId condition_id;
  Verdict verdict = Verdict::Inconclusive;
  nlohmann::json witness;     // counterexample on Fail, certificate on Pass
  nlohmann::json tolerances;
  // Finite proxy for a.e.-[Q]: every grid point / every sample.
  std::string scope = "all grid points / all samples";

  nlohmann::json to_json() const;
};

struct ConditionOptions {
  double positivity_floor = -1e-14;
  double pattern_rel_threshold = 1e-13;  // structural-zero cutoff
  double hs_ceiling = 1e12;
  double hs_divergence_ratio = 10.0;     // per truncation step in the probe
};

// Assumption: T positive. Negative entries above the floor are clamped to 0.
ConditionReport check_positivity(DiscreteOperator& op,
                                 const ConditionOptions& opts = {});

// Primitivity of the zero/nonzero pattern: some boolean power all-ones.
ConditionReport check_eventual_strong_positivity(const DiscreteOperator& op,
                                                 int n_max,
                                                 const ConditionOptions& opts = {});

// For every singleton grid cell S, some n(S) <= n_max with the S column of
// the n-step pattern strictly positive.
ConditionReport check_irreducibility_markov(const StateModel& model,
                                            const Grid& grid, int n_max,
                                            const ConditionOptions& opts = {},
                                            const BuildOptions& build = {});

// Remark-style sufficient condition: products of SDFs over sampled windows
// are strictly positive.
ConditionReport check_no_arbitrage_sufficient(const SDFSpec& sdf,
                                              const StateModel& model, int n,
                                              int samples, std::uint64_t seed);

// Hilbert-Schmidt finiteness at some horizon <= ell, with a truncation-
// refinement divergence probe.
ConditionReport check_power_compactness(const StateModel& model,
                                        const SDFSpec& sdf, const Grid& grid,
                                        int ell,
                                        const ConditionOptions& opts = {},
                                        const BuildOptions& build = {});

// Bounded yields y_n(x) <= C, plus the induced lower bound T^n 1 >= delta 1
// certifying r(T) > 0.
ConditionReport check_yield_nondegeneracy(const DiscreteOperator& op, int n_max,
                                          const ConditionOptions& opts = {});

// Stacked states have deterministic coordinates; the one-step operator has
// no kernel density. Inconclusive by design (non-compactness is an
// infinite-dimensional statement).
ConditionReport detect_degenerate_transition(const StateModel& model);

}  // namespace perron
