#include "rlorf/blackjack.hpp"

#include <algorithm>
#include <numeric>
#include <string>

#include "rlorf/error.hpp"

namespace rlorf {

HandValue hand_value(const std::vector<int>& cards) {
  const int raw = std::accumulate(cards.begin(), cards.end(), 0);
  bool has_ace = false;
  for (int c : cards) has_ace = has_ace || c == 1;
  if (has_ace && raw + 10 <= 21) return {raw + 10, true};
  return {raw, false};
}

Blackjack::Blackjack(std::uint64_t seed) : rng_(seed) {}

Blackjack::Blackjack(std::uint64_t seed, std::vector<int> script)
    : rng_(seed), script_(script.begin(), script.end()) {
  for (int c : script_) {
    if (c < 1 || c > 10) throw UsageError("scripted card out of range: " + std::to_string(c));
  }
}

int Blackjack::draw_card() {
  if (!script_.empty()) {
    const int c = script_.front();
    script_.pop_front();
    return c;
  }
  // 1..9 each with probability 1/13, ten-valued cards with 4/13
  std::uniform_int_distribution<int> rank(1, 13);
  return std::min(rank(rng_), 10);
}

Observation Blackjack::reset() {
  player_ = {draw_card(), draw_card()};
  dealer_ = {draw_card()};
  terminal_ = false;
  return state().encode();
}

BlackjackState Blackjack::state() const {
  const HandValue v = hand_value(player_);
  return {v.total, dealer_.empty() ? 0 : dealer_.front(), v.usable_ace};
}

StepResult Blackjack::step(std::uint32_t action) {
  if (terminal_) throw UsageError("blackjack: step called on a finished hand; call reset()");
  if (action >= action_count()) throw UsageError("blackjack: invalid action " + std::to_string(action));

  StepResult result;
  if (action == kHit) {
    player_.push_back(draw_card());
    if (hand_value(player_).total > 21) {
      terminal_ = true;
      result.raw_reward = -1.0;
    }
  } else {
    dealer_.push_back(draw_card());
    while (hand_value(dealer_).total < 17) dealer_.push_back(draw_card());
    const int player = hand_value(player_).total;
    const int dealer = hand_value(dealer_).total;
    terminal_ = true;
    if (dealer > 21 || player > dealer) {
      result.raw_reward = 1.0;
    } else if (player < dealer) {
      result.raw_reward = -1.0;
    }
  }
  result.shaped_reward = result.raw_reward;
  result.terminal = terminal_;
  result.observation = state().encode();
  return result;
}

}  // namespace rlorf
