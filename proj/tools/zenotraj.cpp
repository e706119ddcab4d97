// zenotraj: post-selected open-system dynamics from the command line.
//
//   zenotraj <scenario> [--recipe figX] [--config file.json] [--key value ...]
//
// Exit codes: 0 success, 2 configuration error, 3 numerical failure.

#include <CLI11.hpp>

#include <exception>
#include <iostream>
#include <map>
#include <string>

#include "zenotraj/cli/config.hpp"
#include "zenotraj/cli/result_table.hpp"
#include "zenotraj/cli/run.hpp"
#include "zenotraj/errors.hpp"

namespace {

constexpr int kConfigError = 2;
constexpr int kNumericError = 3;

std::string scenario_help() {
  std::string s = "one of:";
  for (const auto& n : zenotraj::cli::scenario_names()) s += " " + n;
  return s;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Superposed-trajectory open quantum system simulator"};
  app.set_version_flag("--version", zenotraj::cli::kToolVersion);

  std::string scenario;
  std::string config_file;
  app.add_option("scenario", scenario, scenario_help());
  app.add_option("--config", config_file, "JSON file with configuration keys");

  std::map<std::string, std::string> raw;
  for (const auto& [key, entry] : zenotraj::cli::key_table()) {
    if (key == "scenario") continue;
    app.add_option(entry.second, raw[key], "sets '" + key + "'");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  zenotraj::cli::RunConfig cfg;
  try {
    zenotraj::cli::json cli_layer = zenotraj::cli::json::object();
    if (!scenario.empty()) cli_layer["scenario"] = scenario;
    for (const auto& [key, entry] : zenotraj::cli::key_table()) {
      if (key == "scenario") continue;
      if (app.get_option(entry.second)->count() > 0) cli_layer[key] = zenotraj::cli::cli_value(key, raw[key]);
    }
    const auto file_layer =
        config_file.empty() ? zenotraj::cli::json::object() : zenotraj::cli::read_config_file(config_file);
    cfg = zenotraj::cli::resolve_config(file_layer, cli_layer);
  } catch (const std::exception& e) {
    std::cerr << "zenotraj: configuration error: " << e.what() << '\n';
    return kConfigError;
  }

  try {
    const auto table = zenotraj::cli::run(cfg);
    zenotraj::cli::emit(table, cfg.format, cfg.out);
  } catch (const zenotraj::ConfigError& e) {
    std::cerr << "zenotraj: configuration error in " << cfg.scenario << ": " << e.what() << '\n';
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "zenotraj: " << cfg.scenario << " failed: " << e.what() << '\n';
    return kNumericError;
  }
  return 0;
}
