#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <span>
#include <vector>

#include "rlorf/environment.hpp"
#include "rlorf/online_forest.hpp"
#include "rlorf/replay_memory.hpp"
#include "rlorf/rng.hpp"

namespace rlorf {

struct AgentConfig {
  double gamma = 1.0;
  double epsilon = 0.5;
  double epsilon_decay = 0.99;
  double epsilon_min = 0.01;
  std::uint32_t batch_size = 32;
  std::uint32_t memory_capacity = 10000;
  std::optional<std::uint32_t> expand_at_episode;
  std::optional<std::uint32_t> learn_start;  // defaults to batch_size

  void validate() const;
  std::uint32_t effective_learn_start() const { return learn_start.value_or(batch_size); }
  bool operator==(const AgentConfig&) const = default;
};

// Epsilon-greedy choice over action values; ties go to the lowest index.
std::uint32_t greedy_action(std::span<const double> q);

// Q-learning agent with one online forest per action.
class Agent {
 public:
  Agent(AgentConfig config, ForestConfig forest_config, std::uint32_t observation_dim,
        std::uint32_t action_count, std::uint64_t seed);

  std::vector<double> q_values(std::span<const double> state) const;
  std::uint32_t select_action(std::span<const double> state);
  // r if terminal, else r + gamma * max_a Q(s', a).
  double compute_target(const Transition& t) const;

  // Samples a minibatch with replacement and feeds frozen targets to the acting forests.
  void learn_step();
  void remember(Transition t) { memory_.push(std::move(t)); }

  // Plays one episode from a fresh reset, learning after every step. Returns the
  // sum of raw rewards.
  double run_episode(Environment& env);

  std::uint32_t action_count() const { return static_cast<std::uint32_t>(forests_.size()); }
  std::uint32_t observation_dim() const { return dim_; }
  double epsilon() const { return epsilon_; }
  std::uint64_t episode() const { return episode_; }
  const AgentConfig& config() const { return config_; }
  std::span<const OnlineForest> forests() const { return forests_; }
  OnlineForest& forest(std::uint32_t action) { return forests_.at(action); }
  const ReplayMemory& memory() const { return memory_; }

  // Snapshot: forests, config, epsilon, episode counter and the agent's random stream.
  // Replay memory is not persisted.
  void save(std::ostream& os) const;
  static Agent load(std::istream& is);

 private:
  Agent(AgentConfig config, std::uint32_t dim, std::vector<OnlineForest> forests, Rng rng);

  AgentConfig config_;
  std::uint32_t dim_;
  std::vector<OnlineForest> forests_;
  ReplayMemory memory_;
  double epsilon_;
  std::uint64_t episode_ = 0;
  Rng rng_;
};

}  // namespace rlorf
