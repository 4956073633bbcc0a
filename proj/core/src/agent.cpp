#include "rlorf/agent.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <string>

#include "rlorf/error.hpp"
#include "rlorf/serialize.hpp"

namespace rlorf {

namespace {

constexpr std::uint32_t kAgentMagic = 0x524C4147;  // "RLAG"
constexpr std::uint32_t kAgentVersion = 1;

}  // namespace

void AgentConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in [0, 1]");
  if (!(epsilon >= 0.0 && epsilon <= 1.0)) throw ConfigError("epsilon must lie in [0, 1]");
  if (!(epsilon_decay > 0.0 && epsilon_decay <= 1.0)) throw ConfigError("epsilon_decay must lie in (0, 1]");
  if (!(epsilon_min >= 0.0 && epsilon_min <= epsilon)) throw ConfigError("epsilon_min must lie in [0, epsilon]");
  if (batch_size == 0) throw ConfigError("batch_size must be positive");
  if (memory_capacity == 0) throw ConfigError("memory_capacity must be positive");
  if (expand_at_episode && *expand_at_episode == 0) throw ConfigError("expand_at_episode must be positive");
  if (learn_start && *learn_start == 0) throw ConfigError("learn_start must be positive");
}

std::uint32_t greedy_action(std::span<const double> q) {
  return static_cast<std::uint32_t>(std::max_element(q.begin(), q.end()) - q.begin());
}

Agent::Agent(AgentConfig config, ForestConfig forest_config, std::uint32_t observation_dim,
             std::uint32_t action_count, std::uint64_t seed)
    : config_(std::move(config)),
      dim_(observation_dim),
      memory_(config_.memory_capacity),
      epsilon_(config_.epsilon),
      rng_(derive_seed(seed, 0)) {
  config_.validate();
  if (action_count == 0) throw ConfigError("agent needs at least one action");
  forests_.reserve(action_count);
  for (std::uint32_t a = 0; a < action_count; ++a) {
    forests_.emplace_back(forest_config, observation_dim, derive_seed(seed, a + 1));
  }
}

Agent::Agent(AgentConfig config, std::uint32_t dim, std::vector<OnlineForest> forests, Rng rng)
    : config_(std::move(config)),
      dim_(dim),
      forests_(std::move(forests)),
      memory_(config_.memory_capacity),
      epsilon_(config_.epsilon),
      rng_(std::move(rng)) {}

std::vector<double> Agent::q_values(std::span<const double> state) const {
  std::vector<double> q;
  q.reserve(forests_.size());
  for (const OnlineForest& f : forests_) q.push_back(f.predict(state));
  return q;
}

std::uint32_t Agent::select_action(std::span<const double> state) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  if (unit(rng_) < epsilon_) {
    std::uniform_int_distribution<std::uint32_t> any(0, action_count() - 1);
    return any(rng_);
  }
  const auto q = q_values(state);
  return greedy_action(q);
}

double Agent::compute_target(const Transition& t) const {
  if (t.terminal) return t.reward;
  const auto q = q_values(t.next_state);
  return t.reward + config_.gamma * *std::max_element(q.begin(), q.end());
}

void Agent::learn_step() {
  if (memory_.size() < config_.effective_learn_start()) return;
  std::vector<const Transition*> batch;
  std::vector<double> targets;
  batch.reserve(config_.batch_size);
  targets.reserve(config_.batch_size);
  for (std::uint32_t i = 0; i < config_.batch_size; ++i) batch.push_back(&memory_.sample(rng_));
  for (const Transition* t : batch) targets.push_back(compute_target(*t));
  for (std::size_t i = 0; i < batch.size(); ++i) {
    forests_.at(batch[i]->action).update(batch[i]->state, targets[i]);
  }
}

double Agent::run_episode(Environment& env) {
  if (env.action_count() != action_count() || env.observation_dim() != dim_) {
    throw ConfigError("environment '" + env.name() + "' does not match the agent's shape");
  }
  Observation state = env.reset();
  double total = 0.0;
  for (;;) {
    const std::uint32_t action = select_action(state);
    StepResult step = env.step(action);
    total += step.raw_reward;
    const bool done = step.terminal;
    memory_.push(Transition{state, action, step.shaped_reward, step.observation, done});
    learn_step();
    if (done) break;
    state = std::move(step.observation);
  }
  epsilon_ = std::max(config_.epsilon_min, epsilon_ * config_.epsilon_decay);
  ++episode_;
  if (config_.expand_at_episode && episode_ == *config_.expand_at_episode) {
    for (OnlineForest& f : forests_) f.expand();
  }
  return total;
}

void Agent::save(std::ostream& os) const {
  BinaryWriter out(os);
  out.write(kAgentMagic);
  out.write(kAgentVersion);
  out.write(config_.gamma);
  out.write(config_.epsilon);
  out.write(config_.epsilon_decay);
  out.write(config_.epsilon_min);
  out.write(config_.batch_size);
  out.write(config_.memory_capacity);
  out.write<std::uint32_t>(config_.expand_at_episode.value_or(0));
  out.write<std::uint32_t>(config_.learn_start.value_or(0));
  out.write(dim_);
  out.write(epsilon_);
  out.write(episode_);
  out.write_rng(rng_);
  out.write<std::uint32_t>(action_count());
  for (const OnlineForest& f : forests_) f.save(out);
}

Agent Agent::load(std::istream& is) {
  BinaryReader in(is);
  in.expect_tag(kAgentMagic, "agent header");
  if (const auto version = in.read<std::uint32_t>(); version != kAgentVersion) {
    throw std::runtime_error("unsupported agent snapshot version " + std::to_string(version));
  }
  AgentConfig config;
  config.gamma = in.read<double>();
  config.epsilon = in.read<double>();
  config.epsilon_decay = in.read<double>();
  config.epsilon_min = in.read<double>();
  config.batch_size = in.read<std::uint32_t>();
  config.memory_capacity = in.read<std::uint32_t>();
  if (const auto v = in.read<std::uint32_t>(); v != 0) config.expand_at_episode = v;
  if (const auto v = in.read<std::uint32_t>(); v != 0) config.learn_start = v;
  config.validate();
  const auto dim = in.read<std::uint32_t>();
  const auto epsilon = in.read<double>();
  const auto episode = in.read<std::uint64_t>();
  Rng rng = in.read_rng();
  const auto actions = in.read<std::uint32_t>();
  if (actions == 0 || actions > 1024) throw std::runtime_error("snapshot corrupt: action count");
  std::vector<OnlineForest> forests;
  forests.reserve(actions);
  for (std::uint32_t a = 0; a < actions; ++a) forests.push_back(OnlineForest::load(in));
  Agent agent(config, dim, std::move(forests), std::move(rng));
  agent.epsilon_ = epsilon;
  agent.episode_ = episode;
  return agent;
}

}  // namespace rlorf
