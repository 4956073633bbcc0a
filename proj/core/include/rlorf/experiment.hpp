#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rlorf/agent.hpp"
#include "rlorf/online_forest.hpp"
#include "rlorf/run_record.hpp"
#include "rlorf/tabular.hpp"

namespace rlorf {

enum class AgentKind { kRlOrf, kTabular, kRandom };

std::string to_string(AgentKind kind);
AgentKind parse_agent_kind(const std::string& name);

struct ExperimentConfig {
  std::string environment = "blackjack";
  AgentKind agent = AgentKind::kRlOrf;
  AgentConfig agent_config;
  ForestConfig forest_config;
  double alpha = 0.1;  // tabular learning rate
  std::uint32_t episodes = 1000;
  std::uint32_t restarts = 100;
  std::uint64_t seed = 0;
  std::filesystem::path output = "results";
  std::uint32_t threads = 0;  // 0 = hardware concurrency
  bool write_curve = true;

  void validate() const;
  TabularConfig tabular_config() const;
};

nlohmann::json to_json(const ExperimentConfig& config);

// Seed of restart `run`; a pure function of the master seed.
std::uint64_t restart_seed(std::uint64_t master_seed, std::uint32_t run);

// Runs a single restart to completion.
RunRecord run_restart(const ExperimentConfig& config, std::uint32_t run);

// Runs every restart on a worker pool. `on_complete` is invoked (serialized) as
// each restart finishes. Results are ordered by run_id.
std::vector<RunRecord> run_experiment(
    const ExperimentConfig& config,
    const std::function<void(const RunRecord&)>& on_complete = {});

inline constexpr std::uint32_t kWindow = 100;

struct WindowStat {
  std::uint32_t episode = 0;  // 1-based episode closing the window
  double mean = 0.0;
  double sd = 0.0;
};

struct Summary {
  std::size_t runs = 0;
  std::uint32_t episodes = 0;
  std::vector<WindowStat> windows;          // one per episode >= 100
  std::vector<double> final_window_sums;    // each run's trailing-100 sum at the last episode
  std::optional<WindowStat> final_window;   // cross-run statistics of final_window_sums
  double final_episode_mean = 0.0;          // raw reward of the last episode, across runs
  double final_episode_sd = 0.0;
};

// Trailing-100 reward sum of a single run ending at 1-based `episode`.
double trailing_window_sum(const RunRecord& record, std::uint32_t episode);

// Throws std::invalid_argument on an empty or ragged record set.
Summary aggregate(const std::vector<RunRecord>& records);

nlohmann::json to_json(const Summary& summary);
Summary summary_from_json(const nlohmann::json& j);

struct OutputMetadata {
  std::optional<nlohmann::json> config;
  std::optional<std::uint64_t> seed;
  std::optional<double> wall_clock_seconds;
};

// Shortest decimal form that parses back to the same double.
std::string format_double(double v);

std::string runs_csv(const std::vector<RunRecord>& records);
std::string curve_csv(const Summary& summary);
std::vector<RunRecord> parse_runs_csv(const std::string& text);

// Writes runs.csv, summary.json and (optionally) curve.csv into `directory`.
void write_outputs(const std::vector<RunRecord>& records, const Summary& summary,
                   const std::filesystem::path& directory, const OutputMetadata& meta,
                   bool write_curve = true);

}  // namespace rlorf
