#pragma once

#include <stdexcept>
#include <string>

namespace rlorf {

// Invalid configuration values (bad hyperparameters, unknown keys).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Non-finite or mis-shaped observations handed to a learner.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// API misuse such as stepping an environment that already terminated.
class UsageError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// Statistical routine called on samples it cannot handle.
class StatsError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

}  // namespace rlorf
