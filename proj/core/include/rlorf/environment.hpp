#pragma once

#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace rlorf {

using Observation = std::vector<double>;

struct StepResult {
  Observation observation;
  double raw_reward = 0.0;     // what the task reports; used for evaluation
  double shaped_reward = 0.0;  // what the learner trains on
  bool terminal = false;
};

// Episodic task with a discrete action space. Each instance owns its random stream.
class Environment {
 public:
  virtual ~Environment() = default;

  virtual Observation reset() = 0;
  // Throws UsageError when called on a terminated episode.
  virtual StepResult step(std::uint32_t action) = 0;
  virtual std::uint32_t action_count() const = 0;
  virtual std::uint32_t observation_dim() const = 0;
  virtual std::string name() const = 0;
};

// "blackjack" or "cartpole"; throws ConfigError for anything else.
std::unique_ptr<Environment> make_environment(const std::string& name, std::uint64_t seed);

}  // namespace rlorf
