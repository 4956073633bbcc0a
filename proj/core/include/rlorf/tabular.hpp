#pragma once

#include <cstdint>
#include <map>
#include <span>
#include <vector>

#include "rlorf/environment.hpp"
#include "rlorf/replay_memory.hpp"
#include "rlorf/rng.hpp"
#include "rlorf/run_record.hpp"

namespace rlorf {

// Action values over a discrete state space; unseen pairs read as 0.
class QTable {
 public:
  using Key = std::vector<int>;

  explicit QTable(std::uint32_t action_count);

  // Throws ConfigError if the observation is not integer-valued.
  static Key key(std::span<const double> observation);

  double value(const Key& state, std::uint32_t action) const;
  double max_value(const Key& state) const;
  std::vector<double> values(const Key& state) const;
  void set(const Key& state, std::uint32_t action, double v);

  std::uint32_t action_count() const { return actions_; }
  std::size_t visited_states() const { return table_.size(); }
  const std::map<Key, std::vector<double>>& entries() const { return table_; }

 private:
  std::uint32_t actions_;
  std::map<Key, std::vector<double>> table_;
};

// Q(s,a) += alpha * (r + gamma * max_a' Q(s',a') - Q(s,a)); no bootstrap when terminal.
void tabular_update(QTable& table, const Transition& t, double alpha, double gamma);

struct TabularConfig {
  double alpha = 0.1;
  double gamma = 1.0;
  double epsilon = 0.5;
  double epsilon_decay = 0.99;
  double epsilon_min = 0.01;

  void validate() const;
};

// Direct per-step TD learning with the same epsilon schedule as the forest agent.
// Only discrete environments (blackjack) are accepted.
RunRecord run_tabular_experiment(const TabularConfig& config, Environment& env,
                                 std::uint32_t episodes, std::uint64_t seed,
                                 std::uint32_t run_id = 0);

}  // namespace rlorf
