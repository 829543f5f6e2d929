#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "perron/habit.hpp"
#include "perron/operator_core.hpp"

namespace perron {

// Parsed run configuration. Flat key/value sections (INI-style) or an
// equivalent JSON object.
struct RunConfig {
  StateModel model;
  std::optional<SDFSpec> sdf;
  std::optional<HabitModel> habit;

  int grid_points = 64;
  double truncation_sd = 8.0;

  SolverOptions solver;
  OracleOptions oracle;
  BuildOptions build;

  std::vector<std::string> checks;  // empty -> all applicable
  int checks_n_max = 50;
  int yield_n_max = 200;
  int longrun_n_max = 200;

  std::string out_dir = "out";
  bool strict = false;
  std::uint64_t seed = 0;

  std::string raw_text;  // original file content, for the manifest hash

  // Populated for CCAPM-on-AR1 reference runs: closed-form dominant
  // eigenvalue for the manifest comparison field.
  std::optional<double> affine_oracle_rho;
};

using ConfigSections = std::map<std::string, std::map<std::string, std::string>>;

ConfigSections parse_config_text(const std::string& text);  // INI or JSON
RunConfig load_config(const std::string& path);

}  // namespace perron
