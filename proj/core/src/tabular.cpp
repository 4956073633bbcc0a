#include "rlorf/tabular.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "rlorf/agent.hpp"
#include "rlorf/error.hpp"

namespace rlorf {

QTable::QTable(std::uint32_t action_count) : actions_(action_count) {
  if (actions_ == 0) throw ConfigError("Q-table needs at least one action");
}

QTable::Key QTable::key(std::span<const double> observation) {
  Key k;
  k.reserve(observation.size());
  for (double v : observation) {
    const double r = std::round(v);
    if (r != v || !std::isfinite(v)) throw ConfigError("tabular learning requires a discrete observation space");
    k.push_back(static_cast<int>(r));
  }
  return k;
}

double QTable::value(const Key& state, std::uint32_t action) const {
  const auto it = table_.find(state);
  return it == table_.end() ? 0.0 : it->second.at(action);
}

double QTable::max_value(const Key& state) const {
  const auto it = table_.find(state);
  if (it == table_.end()) return 0.0;
  return *std::max_element(it->second.begin(), it->second.end());
}

std::vector<double> QTable::values(const Key& state) const {
  const auto it = table_.find(state);
  return it == table_.end() ? std::vector<double>(actions_, 0.0) : it->second;
}

void QTable::set(const Key& state, std::uint32_t action, double v) {
  auto [it, inserted] = table_.try_emplace(state, actions_, 0.0);
  it->second.at(action) = v;
}

void tabular_update(QTable& table, const Transition& t, double alpha, double gamma) {
  const auto s = QTable::key(t.state);
  const double bootstrap = t.terminal ? 0.0 : gamma * table.max_value(QTable::key(t.next_state));
  const double q = table.value(s, t.action);
  table.set(s, t.action, q + alpha * (t.reward + bootstrap - q));
}

void TabularConfig::validate() const {
  if (!(alpha > 0.0 && alpha <= 1.0)) throw ConfigError("alpha must lie in (0, 1]");
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
  if (!(epsilon_decay > 0.0 && epsilon_decay <= 1.0)) throw ConfigError("epsilon_decay must lie in (0, 1]");
  if (!(epsilon_min >= 0.0 && epsilon_min <= epsilon)) throw ConfigError("epsilon_min must lie in [0, epsilon]");
}

RunRecord run_tabular_experiment(const TabularConfig& config, Environment& env,
                                 std::uint32_t episodes, std::uint64_t seed,
                                 std::uint32_t run_id) {
  config.validate();
  if (env.name() != "blackjack") {
    throw ConfigError("tabular baseline supports only discrete environments, got '" + env.name() + "'");
  }
  QTable table(env.action_count());
  Rng rng(derive_seed(seed, 0));
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::uint32_t> any(0, env.action_count() - 1);

  RunRecord record;
  record.run_id = run_id;
  double epsilon = config.epsilon;
  for (std::uint32_t e = 0; e < episodes; ++e) {
    record.epsilons.push_back(epsilon);
    Observation state = env.reset();
    double total = 0.0;
    for (;;) {
      std::uint32_t action;
      if (unit(rng) < epsilon) {
        action = any(rng);
      } else {
        action = greedy_action(table.values(QTable::key(state)));
      }
      StepResult step = env.step(action);
      total += step.raw_reward;
      tabular_update(table, Transition{state, action, step.shaped_reward, step.observation, step.terminal},
                     config.alpha, config.gamma);
      if (step.terminal) break;
      state = std::move(step.observation);
    }
    record.rewards.push_back(total);
    record.forest_sizes.push_back(0);
    epsilon = std::max(config.epsilon_min, epsilon * config.epsilon_decay);
  }
  return record;
}

}  // namespace rlorf
