#include "perron/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "perron/errors.hpp"

namespace perron {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<double> parse_numbers(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  double v;
  while (ss >> v) out.push_back(v);
  return out;
}

ConfigSections from_json(const nlohmann::json& j) {
  ConfigSections sections;
  for (const auto& [key, val] : j.items()) {
    if (val.is_object()) {
      for (const auto& [k2, v2] : val.items()) {
        if (v2.is_array()) {
          std::string joined;
          for (const auto& item : v2)
            joined += (joined.empty() ? "" : " ") +
                      (item.is_string() ? item.get<std::string>()
                                        : item.dump());
          sections[key][k2] = joined;
        } else if (v2.is_string()) {
          sections[key][k2] = v2.get<std::string>();
        } else {
          sections[key][k2] = v2.dump();
        }
      }
    } else {
      sections[""][key] = val.is_string() ? val.get<std::string>() : val.dump();
    }
  }
  return sections;
}

const std::string* find(const ConfigSections& s, const std::string& sec,
                        const std::string& key) {
  const auto si = s.find(sec);
  if (si == s.end()) return nullptr;
  const auto ki = si->second.find(key);
  if (ki == si->second.end()) return nullptr;
  return &ki->second;
}

double get_num(const ConfigSections& s, const std::string& sec,
               const std::string& key, std::optional<double> def = {}) {
  if (const auto* v = find(s, sec, key)) return std::stod(*v);
  if (def) return *def;
  throw ConfigError("missing key " + sec + "." + key);
}

std::string get_str(const ConfigSections& s, const std::string& sec,
                    const std::string& key, std::optional<std::string> def = {}) {
  if (const auto* v = find(s, sec, key)) return *v;
  if (def) return *def;
  throw ConfigError("missing key " + sec + "." + key);
}

StateModel parse_model(const ConfigSections& s) {
  const std::string kind = get_str(s, "model", "kind");
  if (kind == "discrete_chain") {
    std::vector<std::vector<double>> rows;
    for (int r = 0;; ++r) {
      const auto* row = find(s, "model", "row" + std::to_string(r));
      if (!row) break;
      rows.push_back(parse_numbers(*row));
    }
    if (rows.empty()) throw ConfigError("discrete_chain needs row0, row1, ...");
    DiscreteChain chain;
    const Eigen::Index n = static_cast<Eigen::Index>(rows.size());
    chain.transition.resize(n, n);
    for (Eigen::Index i = 0; i < n; ++i) {
      if (static_cast<Eigen::Index>(rows[i].size()) != n)
        throw ConfigError("transition rows must be square");
      for (Eigen::Index j = 0; j < n; ++j) chain.transition(i, j) = rows[i][j];
    }
    if (const auto* vals = find(s, "model", "values")) {
      const auto v = parse_numbers(*vals);
      chain.state_values =
          Eigen::Map<const Eigen::VectorXd>(v.data(), v.size());
    }
    return chain;
  }
  if (kind == "gaussian_ar1") {
    GaussianAR1 m;
    m.a = get_num(s, "model", "a");
    m.sigma = get_num(s, "model", "sigma");
    return m;
  }
  if (kind == "ou_skeleton") {
    OUSkeleton m;
    m.kappa = get_num(s, "model", "kappa");
    m.sigma = get_num(s, "model", "sigma");
    m.tau = get_num(s, "model", "tau");
    return m;
  }
  if (kind == "stacked_nar") {
    StackedNAR m;
    const auto coeffs = parse_numbers(get_str(s, "model", "coeffs"));
    if (coeffs.empty()) throw ConfigError("stacked_nar needs coeffs");
    m.order = static_cast<int>(coeffs.size());
    Eigen::VectorXd c = Eigen::Map<const Eigen::VectorXd>(coeffs.data(),
                                                          coeffs.size());
    const double intercept = get_num(s, "model", "intercept", 0.0);
    m.mean_fn = [c, intercept](const Eigen::VectorXd& x) {
      return intercept + c.dot(x);
    };
    const std::string law = get_str(s, "model", "innovation", "gaussian");
    const double sd = get_num(s, "model", "innovation_sd");
    if (law == "gaussian") {
      m.innovation = InnovationLaw::normal(sd);
    } else if (law == "logistic") {
      m.innovation = InnovationLaw::logistic(sd * std::sqrt(3.0) / M_PI);
    } else {
      throw ConfigError("unknown innovation law " + law);
    }
    return m;
  }
  throw ConfigError("unknown model kind " + kind);
}

SDFSpec parse_sdf(const ConfigSections& s) {
  const std::string kind = get_str(s, "sdf", "kind");
  if (kind == "unit") return SDFSpec::unit();
  if (kind == "constant") return SDFSpec::constant(get_num(s, "sdf", "beta"));
  if (kind == "ccapm") {
    const double beta = get_num(s, "sdf", "beta");
    const double gamma = get_num(s, "sdf", "gamma");
    const std::string growth = get_str(s, "sdf", "growth", "next_state");
    if (growth == "next_state")
      return SDFSpec::ccapm(beta, gamma,
                            [](const Eigen::VectorXd&, const Eigen::VectorXd& xp,
                               double) { return xp(0); });
    if (growth == "state_diff")
      return SDFSpec::ccapm(beta, gamma,
                            [](const Eigen::VectorXd& x,
                               const Eigen::VectorXd& xp, double) {
                              return xp(0) - x(0);
                            });
    throw ConfigError("unknown growth map " + growth);
  }
  throw ConfigError("unknown sdf kind " + kind);
}

HabitModel parse_habit(const ConfigSections& s, const StateModel& model) {
  HabitModel hm;
  hm.gamma = get_num(s, "habit", "gamma");
  if (!std::holds_alternative<StackedNAR>(model))
    throw ConfigError("habit mode requires a stacked_nar growth model");
  hm.growth_model = model;
  hm.ell = std::get<StackedNAR>(model).order;
  const std::string kind = get_str(s, "habit", "return_kind", "constant");
  if (kind == "constant") {
    const double value = get_num(s, "habit", "return_value");
    hm.return_fn = [value](const Eigen::VectorXd&, double) { return value; };
  } else if (kind == "affine") {
    const double c0 = get_num(s, "habit", "return_c0");
    const double c1 = get_num(s, "habit", "return_c1", 0.0);
    hm.return_fn = [c0, c1](const Eigen::VectorXd&, double gp) {
      return c0 + c1 * gp;
    };
  } else {
    throw ConfigError("unknown return_kind " + kind);
  }
  return hm;
}

}  // namespace

ConfigSections parse_config_text(const std::string& text) {
  const std::string trimmed = trim(text);
  if (!trimmed.empty() && trimmed[0] == '{') {
    try {
      return from_json(nlohmann::json::parse(trimmed));
    } catch (const nlohmann::json::exception& e) {
      throw ConfigError(std::string("JSON parse error: ") + e.what());
    }
  }
  ConfigSections sections;
  std::string current;
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    if (line.front() == '[' && line.back() == ']') {
      current = trim(line.substr(1, line.size() - 2));
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("malformed config line: " + line);
    sections[current][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
  }
  return sections;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  RunConfig cfg;
  cfg.raw_text = buf.str();
  const ConfigSections s = parse_config_text(cfg.raw_text);

  cfg.model = parse_model(s);
  const bool has_sdf = s.count("sdf") > 0;
  const bool has_habit = s.count("habit") > 0;
  if (has_sdf == has_habit)
    throw ConfigError("exactly one of [sdf] or [habit] must be present");
  if (has_sdf) cfg.sdf = parse_sdf(s);
  if (has_habit) cfg.habit = parse_habit(s, cfg.model);

  if (!find(s, "", "seed"))
    throw ConfigError("seed is mandatory");
  cfg.seed = static_cast<std::uint64_t>(get_num(s, "", "seed"));

  cfg.grid_points = static_cast<int>(get_num(s, "grid", "points", 64));
  cfg.truncation_sd = get_num(s, "grid", "truncation", 8.0);

  cfg.solver.tol = get_num(s, "solver", "tol", 1e-12);
  cfg.solver.max_iter =
      static_cast<long long>(get_num(s, "solver", "max_iter", 100000));
  cfg.oracle.dense_limit =
      static_cast<Eigen::Index>(get_num(s, "solver", "dense_limit", 2000));

  if (const auto* run = find(s, "checks", "run")) {
    std::stringstream cs(*run);
    std::string item;
    while (std::getline(cs, item, ',')) {
      item = trim(item);
      if (!item.empty()) cfg.checks.push_back(item);
    }
  }
  cfg.checks_n_max = static_cast<int>(get_num(s, "checks", "n_max", 50));
  cfg.yield_n_max = static_cast<int>(get_num(s, "output", "yield_n_max", 200));
  cfg.longrun_n_max =
      static_cast<int>(get_num(s, "output", "longrun_n_max", 200));
  cfg.out_dir = get_str(s, "output", "directory", "out");

  // Closed-form comparison value for the reference CCAPM/AR(1) setup.
  if (has_sdf && find(s, "sdf", "kind") && *find(s, "sdf", "kind") == "ccapm" &&
      std::holds_alternative<GaussianAR1>(cfg.model) &&
      get_str(s, "sdf", "growth", "next_state") == "next_state") {
    const auto& m = std::get<GaussianAR1>(cfg.model);
    const double gamma = get_num(s, "sdf", "gamma");
    const double beta = get_num(s, "sdf", "beta");
    cfg.affine_oracle_rho =
        beta * std::exp(gamma * gamma * m.sigma * m.sigma /
                        (2.0 * (1.0 - m.a) * (1.0 - m.a)));
  }
  return cfg;
}

}  // namespace perron
