#pragma once

#include <string>
#include <vector>

#include <CLI11.hpp>

#include "rlorf/experiment.hpp"

namespace rlorf::cli {

// Flat, kebab-case mirror of ExperimentConfig as seen on the command line or in a
// TOML/INI config file. Zero means "unset" for expand-at, max-depth and learn-start.
struct RunOptions {
  std::string env = "blackjack";
  std::string agent = "rl-orf";
  double gamma = 1.0;
  double epsilon = 0.5;
  double epsilon_decay = 0.99;
  double epsilon_min = 0.01;
  std::uint32_t batch_size = 32;
  std::uint32_t memory_capacity = 10000;
  std::uint32_t expand_at = 0;
  std::uint32_t learn_start = 0;
  std::uint32_t m_init = 100;
  std::uint32_t m_max = 200;
  double phi = 1.0 / 5000.0;
  std::uint32_t lambda_window = 50;
  double mu = 0.01;
  double poisson_rate = 1.0;
  std::uint32_t eta = 32;
  double beta = 0.01;
  std::uint32_t tests_per_feature = 10;
  std::uint32_t max_depth = 0;
  std::uint32_t warmup_count = 2;
  bool relative_gain = false;
  double alpha = 0.1;
  std::uint32_t episodes = 1000;
  std::uint32_t restarts = 100;
  std::uint64_t seed = 0;
  std::string output = "results";
  std::uint32_t threads = 0;
  bool no_curve = false;
};

// Registers every run flag on `app`, plus --config for a file of the same keys.
void register_run_options(CLI::App& app, RunOptions& options);

// Builds and validates the experiment; throws ConfigError.
ExperimentConfig resolve(const RunOptions& options);

// Parses `run` arguments (without the subcommand name). CLI flags override file
// values, which override defaults. Throws ConfigError on any parse failure.
ExperimentConfig parse_config(const std::vector<std::string>& args);

}  // namespace rlorf::cli
