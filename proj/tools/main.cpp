#include <exception>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "stacksim/experiments.hpp"

namespace {

stacksim::ExperimentConfig load_config(const std::string& path, const std::string& mode) {
  stacksim::ExperimentConfig cfg = stacksim::parse_config_file(path);
  if (cfg.mode.empty())
    cfg.mode = mode;
  else if (cfg.mode != mode)
    throw stacksim::invalid_config_error(path + ": config has mode '" + cfg.mode +
                                         "' but the " + mode + " command was invoked");
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"repeated-game simulator and Stackelberg value solver"};
  app.require_subcommand(1);

  std::string values_game;
  double grid = 1.0 / 50.0;
  CLI::App* values = app.add_subcommand("values", "compute the Stackelberg value hierarchy");
  values->add_option("game", values_game, "game file path or built-in name (ce1, ce2)")
      ->required();
  values->add_option("--grid", grid, "grid resolution: a mesh (0.02) or a denominator (50)");

  std::string simulate_config;
  CLI::App* simulate = app.add_subcommand("simulate", "run seeded simulations to a metrics CSV");
  simulate->add_option("config", simulate_config, "experiment config file")->required();

  std::string which, trajectory_out, metrics_out;
  int rounds = 0;
  CLI::App* counterexample =
      app.add_subcommand("counterexample", "replay a built-in scripted counterexample");
  counterexample->add_option("which", which, "ce1 or ce2")->required();
  counterexample->add_option("--rounds", rounds, "number of rounds")->required();
  counterexample->add_option("--trajectory", trajectory_out, "also write the profiles to a file");
  counterexample->add_option("--metrics", metrics_out, "also write a metrics CSV");

  std::string guarantee_config;
  CLI::App* guarantee =
      app.add_subcommand("guarantee", "check the commitment guarantee empirically");
  guarantee->add_option("config", guarantee_config, "experiment config file")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // help and version are successes; bad usage is a user error
  }

  try {
    if (values->parsed()) {
      stacksim::cmd_values(values_game, stacksim::normalize_grid_resolution(grid), std::cout);
    } else if (simulate->parsed()) {
      stacksim::cmd_simulate(load_config(simulate_config, "simulate"), std::cout);
    } else if (counterexample->parsed()) {
      stacksim::cmd_counterexample(which, rounds, std::cout, trajectory_out, metrics_out);
    } else if (guarantee->parsed()) {
      stacksim::cmd_guarantee(load_config(guarantee_config, "guarantee"), std::cout);
    }
  } catch (const stacksim::unsupported_size_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::logic_error& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  } catch (const std::runtime_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "internal error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
