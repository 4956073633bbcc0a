#pragma once

#include <cstdint>
#include <vector>

#include "rlorf/environment.hpp"
#include "rlorf/rng.hpp"

namespace rlorf {

struct Transition {
  Observation state;
  std::uint32_t action = 0;
  double reward = 0.0;
  Observation next_state;
  bool terminal = false;

  bool operator==(const Transition&) const = default;
};

// Bounded ring of the most recent transitions.
class ReplayMemory {
 public:
  explicit ReplayMemory(std::size_t capacity);

  void push(Transition t);
  // Uniform draw; the memory must be non-empty.
  const Transition& sample(Rng& rng) const;

  std::size_t size() const { return buffer_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return buffer_.empty(); }
  // Oldest first.
  std::vector<Transition> contents() const;

 private:
  std::size_t capacity_;
  std::size_t cursor_ = 0;  // slot overwritten by the next push once full
  std::vector<Transition> buffer_;
};

}  // namespace rlorf
