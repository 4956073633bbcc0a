#include "rlorf/replay_memory.hpp"

#include "rlorf/error.hpp"

namespace rlorf {

ReplayMemory::ReplayMemory(std::size_t capacity) : capacity_(capacity) {
  if (capacity_ == 0) throw ConfigError("replay memory capacity must be positive");
  buffer_.reserve(capacity_);
}

void ReplayMemory::push(Transition t) {
  if (buffer_.size() < capacity_) {
    buffer_.push_back(std::move(t));
    return;
  }
  buffer_[cursor_] = std::move(t);
  cursor_ = (cursor_ + 1) % capacity_;
}

const Transition& ReplayMemory::sample(Rng& rng) const {
  if (buffer_.empty()) throw UsageError("cannot sample from an empty replay memory");
  std::uniform_int_distribution<std::size_t> pick(0, buffer_.size() - 1);
  return buffer_[pick(rng)];
}

std::vector<Transition> ReplayMemory::contents() const {
  std::vector<Transition> out;
  out.reserve(buffer_.size());
  for (std::size_t i = 0; i < buffer_.size(); ++i) out.push_back(buffer_[(cursor_ + i) % buffer_.size()]);
  return out;
}

}  // namespace rlorf
