#pragma once

#include <cstdint>
#include <deque>
#include <vector>

#include "rlorf/environment.hpp"
#include "rlorf/rng.hpp"

namespace rlorf {

struct BlackjackState {
  int player_sum = 0;      // usable ace counted as 11
  int dealer_showing = 0;  // 1 (ace) .. 10
  bool usable_ace = false;

  Observation encode() const {
    return {static_cast<double>(player_sum), static_cast<double>(dealer_showing),
            usable_ace ? 1.0 : 0.0};
  }
  bool operator==(const BlackjackState&) const = default;
};

// Value of a hand of cards (ace = 1): {best total, whether an ace counts as 11}.
struct HandValue {
  int total = 0;
  bool usable_ace = false;
};
HandValue hand_value(const std::vector<int>& cards);

// Infinite-deck blackjack: actions 0 = stick, 1 = hit. Naturals pay +1, ties 0,
// dealer stands on every 17.
class Blackjack final : public Environment {
 public:
  static constexpr std::uint32_t kStick = 0;
  static constexpr std::uint32_t kHit = 1;

  explicit Blackjack(std::uint64_t seed);
  // Cards in `script` are dealt first (player, player, dealer, then in draw order).
  Blackjack(std::uint64_t seed, std::vector<int> script);

  Observation reset() override;
  StepResult step(std::uint32_t action) override;
  std::uint32_t action_count() const override { return 2; }
  std::uint32_t observation_dim() const override { return 3; }
  std::string name() const override { return "blackjack"; }

  BlackjackState state() const;
  const std::vector<int>& player_cards() const { return player_; }
  const std::vector<int>& dealer_cards() const { return dealer_; }
  bool terminal() const { return terminal_; }

 private:
  int draw_card();

  Rng rng_;
  std::deque<int> script_;
  std::vector<int> player_;
  std::vector<int> dealer_;
  bool terminal_ = true;
};

}  // namespace rlorf
