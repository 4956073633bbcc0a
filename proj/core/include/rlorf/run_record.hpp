#pragma once

#include <cstdint>
#include <vector>

namespace rlorf {

// Per-episode trace of one restart.
struct RunRecord {
  std::uint32_t run_id = 0;
  std::vector<double> rewards;  // raw episode rewards
  std::vector<double> epsilons;  // exploration rate the episode was played with
  std::vector<std::uint32_t> forest_sizes;  // trees per action forest; 0 for non-forest agents

  bool operator==(const RunRecord&) const = default;
};

}  // namespace rlorf
