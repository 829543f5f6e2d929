#include <iostream>
#include <map>
#include <string>

#include <CLI11.hpp>

#include "perron/errors.hpp"
#include "perron/pipeline.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Markov pricing-operator toolkit: discretize, check "
               "identification conditions, solve the dominant eigenpair, and "
               "produce pricing outputs"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  long long seed_override = -1;
  long long dense_limit = -1;
  bool strict = false;

  const std::map<std::string, perron::Command> commands = {
      {"run", perron::Command::Run},           {"check", perron::Command::Check},
      {"solve", perron::Command::Solve},       {"price", perron::Command::Price},
      {"decompose", perron::Command::Decompose},
      {"habit", perron::Command::Habit},       {"plotdata", perron::Command::PlotData}};

  for (const auto& [name, cmd] : commands) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "configuration file")->required();
    sub->add_option("--seed", seed_override, "override config seed");
    sub->add_option("--out", out_dir, "override output directory");
    sub->add_option("--dense-limit", dense_limit, "dense oracle size limit");
    sub->add_flag("--strict", strict, "abort on failing checks");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    perron::RunConfig cfg = perron::load_config(config_path);
    if (seed_override >= 0)
      cfg.seed = static_cast<std::uint64_t>(seed_override);
    if (!out_dir.empty()) cfg.out_dir = out_dir;
    if (dense_limit > 0) cfg.oracle.dense_limit = dense_limit;
    if (strict) cfg.strict = true;
    const auto cmd = commands.at(app.get_subcommands().front()->get_name());
    return perron::run_pipeline(cfg, cmd);
  } catch (const perron::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const perron::NoConvergence& e) {
    std::cerr << "solver error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
