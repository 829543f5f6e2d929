#include "perron/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iostream>

#include <json.hpp>

#include "perron/conditions.hpp"
#include "perron/errors.hpp"
#include "perron/io.hpp"
#include "perron/pricing.hpp"

namespace perron {

namespace fs = std::filesystem;

namespace {

std::uint64_t text_hash(const std::string& text) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (const unsigned char c : text) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[20];
  std::snprintf(buf, sizeof(buf), "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

struct ArtifactLog {
  fs::path dir;
  std::vector<fs::path> files;

  fs::path path(const std::string& name) {
    const fs::path p = dir / name;
    files.push_back(p);
    return p;
  }
};

void write_json(const fs::path& p, const nlohmann::json& j) {
  std::ofstream out(p);
  if (!out) throw Error("cannot open " + p.string());
  out << j.dump(2) << "\n";
}

std::vector<ConditionReport> run_checks(const RunConfig& cfg,
                                        DiscreteOperator& op,
                                        const Grid& grid,
                                        const SDFSpec& sdf) {
  std::vector<std::string> names = cfg.checks;
  if (names.empty())
    names = {"positivity",          "strong_positivity", "irreducibility",
             "no_arbitrage",        "power_compactness", "yield_nondegeneracy",
             "degenerate_transition"};
  const int ell = std::holds_alternative<StackedNAR>(cfg.model)
                      ? std::get<StackedNAR>(cfg.model).order
                      : 1;
  std::vector<ConditionReport> reports;
  for (const auto& name : names) {
    if (name == "positivity") {
      reports.push_back(check_positivity(op));
    } else if (name == "strong_positivity") {
      reports.push_back(check_eventual_strong_positivity(op, cfg.checks_n_max));
    } else if (name == "irreducibility") {
      reports.push_back(check_irreducibility_markov(cfg.model, grid,
                                                    cfg.checks_n_max, {},
                                                    cfg.build));
    } else if (name == "no_arbitrage") {
      reports.push_back(check_no_arbitrage_sufficient(
          sdf, cfg.model, std::min(cfg.checks_n_max, 16), 1000,
          child_seed(cfg.seed, 11)));
    } else if (name == "power_compactness") {
      reports.push_back(
          check_power_compactness(cfg.model, sdf, grid, ell, {}, cfg.build));
    } else if (name == "yield_nondegeneracy") {
      reports.push_back(check_yield_nondegeneracy(op, cfg.checks_n_max));
    } else if (name == "degenerate_transition") {
      reports.push_back(detect_degenerate_transition(cfg.model));
    } else {
      throw ConfigError("unknown check " + name);
    }
  }
  return reports;
}

int plotdata(const RunConfig& cfg) {
  const fs::path dir(cfg.out_dir);
  auto emit_series = [&](const fs::path& src, const fs::path& dst, int xcol,
                         int ycol, bool mean_rest) {
    std::ifstream in(src);
    if (!in) return;
    std::string line;
    std::getline(in, line);
    std::ofstream out(dst);
    out << "x,y\n";
    while (std::getline(in, line)) {
      if (line.empty()) continue;
      std::vector<double> row;
      std::stringstream ss(line);
      std::string cell;
      while (std::getline(ss, cell, ',')) row.push_back(std::stod(cell));
      double y;
      if (mean_rest) {
        y = 0.0;
        for (std::size_t c = ycol; c < row.size(); ++c) y += row[c];
        y /= static_cast<double>(row.size() - ycol);
      } else {
        y = row[ycol];
      }
      out << format_double(row[xcol]) << "," << format_double(y) << "\n";
    }
  };
  emit_series(dir / "longrun_error.csv", dir / "plot_longrun.csv", 0, 1, false);
  emit_series(dir / "yield_curve.csv", dir / "plot_yield.csv", 0, 1, true);
  return 0;
}

}  // namespace

int run_pipeline(const RunConfig& cfg, Command cmd) {
  if (cmd == Command::PlotData) return plotdata(cfg);

  ArtifactLog log;
  log.dir = cfg.out_dir;
  fs::create_directories(log.dir);

  GridOptions gopts;
  gopts.truncation_sd = cfg.truncation_sd;
  const StateModel& model =
      cfg.habit ? cfg.habit->growth_model : cfg.model;
  const Grid grid = stationary_grid(model, cfg.grid_points, gopts);

  SDFSpec sdf;
  DiscreteOperator op;
  if (cfg.habit) {
    op = build_habit_operator(*cfg.habit, grid, cfg.build);
    const double gamma = cfg.habit->gamma;
    auto ret = cfg.habit->return_fn;
    sdf.m = [gamma, ret](const Eigen::VectorXd& x, const Eigen::VectorXd& xp,
                         double) {
      return std::exp(-gamma * xp(0)) * ret(x, xp(0));
    };
    sdf.name = "habit";
  } else {
    sdf = *cfg.sdf;
    op = build_pricing_operator(model, sdf, grid, cfg.build);
  }

  // 1. Condition reports.
  bool any_fail = false;
  if (cmd == Command::Run || cmd == Command::Check) {
    const auto reports = run_checks(cfg, op, grid, sdf);
    nlohmann::json arr = nlohmann::json::array();
    std::cout << "condition checks:\n";
    for (const auto& rep : reports) {
      arr.push_back(rep.to_json());
      std::cout << "  " << to_string(rep.condition_id) << ": "
                << to_string(rep.verdict) << "\n";
      if (rep.verdict == Verdict::Fail) any_fail = true;
    }
    write_json(log.path("checks.json"), arr);
    if (any_fail && cfg.strict) {
      std::cerr << "check failed (strict mode)\n";
      return 3;
    }
  }

  // 2. Operator artifacts.
  export_operator(op, log.path("operator.csv"), log.path("operator_meta.json"));
  export_grid_csv(grid, log.path("grid.csv"));

  if (cmd == Command::Check) return any_fail ? 3 : 0;

  // 3. Eigenpair and spectrum.
  Eigenpair pair;
  try {
    pair = dominant_eigenpair(op, cfg.solver);
  } catch (const NoConvergence& e) {
    std::cerr << "solver did not converge: " << e.what() << "\n";
    return 4;
  }
  {
    Eigen::MatrixXd data(grid.size(), grid.dim() + 3);
    data.leftCols(grid.dim()) = grid.points;
    data.col(grid.dim()) = grid.weights;
    data.col(grid.dim() + 1) = pair.phi;
    data.col(grid.dim() + 2) = pair.phi_star;
    std::vector<std::string> header;
    for (Eigen::Index d = 0; d < grid.dim(); ++d)
      header.push_back("x" + std::to_string(d + 1));
    header.insert(header.end(), {"weight", "phi", "phi_star"});
    write_csv(log.path("eigenpair.csv"), header, data);
  }
  if (grid.size() <= cfg.oracle.dense_limit) {
    const SpectrumReport rep = full_spectrum_oracle(op, cfg.oracle);
    nlohmann::json j;
    j["spectral_radius"] = rep.spectral_radius;
    j["second_modulus"] = rep.second_modulus;
    j["positive_eigenvector_count"] = rep.positive_eigenvector_count;
    j["is_simple"] = rep.is_simple;
    j["is_isolated"] = rep.is_isolated;
    j["on_circle_count"] = rep.on_circle_count;
    j["eigenvalues"] = nlohmann::json::array();
    for (const auto& ev : rep.eigenvalues)
      j["eigenvalues"].push_back({ev.real(), ev.imag()});
    write_json(log.path("spectrum.json"), j);
  }

  // 4. Pricing outputs.
  if (cmd == Command::Run || cmd == Command::Price) {
    const YieldCurve yc = yield_curve(op, cfg.yield_n_max);
    Eigen::MatrixXd data(yc.horizons.size(), grid.size() + 1);
    for (std::size_t h = 0; h < yc.horizons.size(); ++h) {
      data(h, 0) = yc.horizons[h];
      data.row(h).tail(grid.size()) = yc.yields.row(h);
    }
    std::vector<std::string> header = {"horizon"};
    for (Eigen::Index i = 0; i < grid.size(); ++i)
      header.push_back("y_x" + std::to_string(i));
    write_csv(log.path("yield_curve.csv"), header, data);

    const Eigen::VectorXd errs = long_run_limit_check(
        op, pair, Eigen::VectorXd::Ones(grid.size()), cfg.longrun_n_max);
    Eigen::MatrixXd edata(errs.size(), 2);
    for (Eigen::Index i = 0; i < errs.size(); ++i) {
      edata(i, 0) = i + 1;
      edata(i, 1) = errs(i);
    }
    write_csv(log.path("longrun_error.csv"), {"n", "error"}, edata);
  }

  // 5. Decomposition or habit solution.
  if (cfg.habit && (cmd == Command::Run || cmd == Command::Habit)) {
    const HabitSolution sol = recover_habit(op, cfg.solver, cfg.oracle);
    Eigen::MatrixXd data(grid.size(), grid.dim() + 1);
    data.leftCols(grid.dim()) = grid.points;
    data.col(grid.dim()) = sol.h;
    std::vector<std::string> header;
    for (Eigen::Index d = 0; d < grid.dim(); ++d)
      header.push_back("x" + std::to_string(d + 1));
    header.push_back("h");
    write_csv(log.path("habit_solution.csv"), header, data);
    write_json(log.path("habit_summary.json"),
               {{"beta", sol.beta},
                {"residual", sol.residual},
                {"unique_positive_eigenvector",
                 sol.uniqueness_certificate.positive_eigenvector_count == 1}});
  } else if (!cfg.habit && (cmd == Command::Run || cmd == Command::Decompose)) {
    const Decomposition dec = decompose(op, pair, cfg.oracle);
    Eigen::MatrixXd data(grid.size(), grid.dim() + 4);
    data.leftCols(grid.dim()) = grid.points;
    data.col(grid.dim()) = grid.weights;
    data.col(grid.dim() + 1) = pair.phi;
    data.col(grid.dim() + 2) = pair.phi_star;
    data.col(grid.dim() + 3) = dec.pi_tilde;
    std::vector<std::string> header;
    for (Eigen::Index d = 0; d < grid.dim(); ++d)
      header.push_back("x" + std::to_string(d + 1));
    header.insert(header.end(), {"weight", "phi", "phi_star", "pi_tilde"});
    write_csv(log.path("decomposition.csv"), header, data);
    nlohmann::json constants;
    for (std::size_t i = 0; i < dec.battery_names.size(); ++i)
      constants[dec.battery_names[i]] = dec.long_run_constants[i];
    write_json(log.path("decomposition_constants.json"), constants);
  }

  // 6. Manifest.
  {
    std::ofstream out(log.dir / "manifest.txt");
    out << "config_hash = " << hex64(text_hash(cfg.raw_text)) << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "rho = " << format_double(pair.rho) << "\n";
    out << "gap = " << format_double(pair.gap) << "\n";
    out << "residual = " << format_double(pair.residual) << "\n";
    if (cfg.affine_oracle_rho) {
      out << "affine_oracle_rho = " << format_double(*cfg.affine_oracle_rho)
          << "\n";
      out << "affine_oracle_rel_err = "
          << format_double(std::abs(pair.rho - *cfg.affine_oracle_rho) /
                           *cfg.affine_oracle_rho)
          << "\n";
    }
    for (const auto& f : log.files)
      out << "artifact " << f.filename().string() << " " << file_hash(f)
          << "\n";
  }

  std::cout << "rho = " << format_double(pair.rho) << "\n";
  return any_fail ? 3 : 0;
}

}  // namespace perron
