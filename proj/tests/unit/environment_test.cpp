#include <gtest/gtest.h>

#include <cmath>

#include "oracles/oracles.hpp"
#include "rlorf/blackjack.hpp"
#include "rlorf/cartpole.hpp"
#include "rlorf/environment.hpp"
#include "rlorf/error.hpp"

namespace rlorf {
namespace {

TEST(HandValue, AcesCountElevenWhenTheyFit) {
  EXPECT_EQ(hand_value({1, 1}).total, 12);
  EXPECT_TRUE(hand_value({1, 1}).usable_ace);
  EXPECT_EQ(hand_value({1, 10}).total, 21);
  EXPECT_EQ(hand_value({1, 1, 10}).total, 12);
  EXPECT_FALSE(hand_value({1, 1, 10}).usable_ace);
  EXPECT_EQ(hand_value({10, 9}).total, 19);
  EXPECT_FALSE(hand_value({10, 9}).usable_ace);
}

TEST(Blackjack, ResetDealsTwoPlayerCardsAndOneDealerCard) {
  Blackjack aces(0, {1, 1, 7});
  EXPECT_EQ(aces.reset(), (Observation{12, 7, 1}));

  Blackjack plain(0, {10, 9, 4});
  EXPECT_EQ(plain.reset(), (Observation{19, 4, 0}));
  EXPECT_EQ(plain.player_cards().size(), 2u);
  EXPECT_EQ(plain.dealer_cards().size(), 1u);
  EXPECT_EQ(plain.observation_dim(), 3u);
  EXPECT_EQ(plain.action_count(), 2u);
}

TEST(Blackjack, DealerShowsTenWithProbabilityFourThirteenths) {
  Blackjack env(99);
  int tens = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) tens += env.reset()[1] == 10.0;
  EXPECT_NEAR(tens / static_cast<double>(n), 4.0 / 13.0, 0.01);
}

TEST(Blackjack, StickOnTwentyOneBeatsNineteen) {
  // player A,10; dealer shows 9 and turns a 10
  Blackjack env(0, {1, 10, 9, 10});
  env.reset();
  const StepResult r = env.step(Blackjack::kStick);
  EXPECT_TRUE(r.terminal);
  EXPECT_EQ(hand_value(env.dealer_cards()).total, 19);
  EXPECT_EQ(r.raw_reward, 1.0);
  EXPECT_EQ(r.shaped_reward, 1.0);
}

TEST(Blackjack, StickOutcomes) {
  Blackjack lose(0, {10, 7, 10, 10});  // 17 vs 20
  lose.reset();
  EXPECT_EQ(lose.step(Blackjack::kStick).raw_reward, -1.0);

  Blackjack tie(0, {10, 8, 10, 8});  // 18 vs 18
  tie.reset();
  EXPECT_EQ(tie.step(Blackjack::kStick).raw_reward, 0.0);

  Blackjack dealer_bust(0, {10, 2, 10, 6, 10});  // dealer 16 draws to 26
  dealer_bust.reset();
  EXPECT_EQ(dealer_bust.step(Blackjack::kStick).raw_reward, 1.0);

  Blackjack soft17(0, {10, 8, 1, 6, 5});  // dealer stands on soft 17
  soft17.reset();
  EXPECT_EQ(soft17.step(Blackjack::kStick).raw_reward, 1.0);
  EXPECT_EQ(soft17.dealer_cards().size(), 2u);
}

TEST(Blackjack, HitPastTwentyOneBusts) {
  Blackjack env(0, {10, 6, 5, 10});
  env.reset();
  const StepResult r = env.step(Blackjack::kHit);
  EXPECT_TRUE(r.terminal);
  EXPECT_EQ(r.raw_reward, -1.0);
  EXPECT_EQ(r.observation[0], 26.0);
}

TEST(Blackjack, SoftTwelveHittingTenDemotesAce) {
  Blackjack env(0, {1, 1, 5, 10});
  EXPECT_EQ(env.reset(), (Observation{12, 5, 1}));
  const StepResult r = env.step(Blackjack::kHit);
  EXPECT_FALSE(r.terminal);
  EXPECT_EQ(r.raw_reward, 0.0);
  EXPECT_EQ(r.observation, (Observation{12, 5, 0}));
}

TEST(Blackjack, StepAfterTerminalIsAnError) {
  Blackjack env(3);
  EXPECT_THROW(env.step(0), UsageError);
  env.reset();
  env.step(Blackjack::kStick);
  EXPECT_THROW(env.step(Blackjack::kHit), UsageError);
  env.reset();
  EXPECT_THROW(env.step(2), UsageError);
}

TEST(BlackjackProperty, RewardsAndLengthsAreBounded) {
  Blackjack env(5);
  Rng policy(6);
  std::bernoulli_distribution hit(0.5);
  double total = 0.0;
  const int episodes = 100000;
  for (int e = 0; e < episodes; ++e) {
    env.reset();
    int steps = 0;
    StepResult r;
    do {
      r = env.step(hit(policy) ? Blackjack::kHit : Blackjack::kStick);
      ++steps;
    } while (!r.terminal);
    ASSERT_TRUE(r.raw_reward == -1.0 || r.raw_reward == 0.0 || r.raw_reward == 1.0);
    ASSERT_LE(steps, 22);
    total += r.raw_reward;
  }
  EXPECT_LT(total / episodes, 0.0);
}

TEST(CartPole, ResetStaysInSmallBox) {
  CartPole env(4);
  EXPECT_EQ(env.observation_dim(), 4u);
  for (int i = 0; i < 1000; ++i) {
    const Observation o = env.reset();
    ASSERT_EQ(o.size(), 4u);
    for (double v : o) {
      ASSERT_GE(v, -0.05);
      ASSERT_LE(v, 0.05);
    }
  }
  CartPole a(7);
  CartPole b(7);
  EXPECT_EQ(a.reset(), b.reset());
}

TEST(CartPole, EulerStepFromRestMatchesClosedForm) {
  CartPole env(0);
  env.set_state({});
  const StepResult r = env.step(1);
  const auto expected = oracle::cartpole_step_from_rest_right();
  for (int i = 0; i < 4; ++i) EXPECT_NEAR(r.observation[i], expected[i], 1e-6);
  EXPECT_NEAR(r.observation[1], 0.1951, 1e-4);
  EXPECT_NEAR(r.observation[3], -0.2927, 1e-4);
  EXPECT_FALSE(r.terminal);
  EXPECT_EQ(r.raw_reward, 1.0);
  EXPECT_EQ(r.shaped_reward, 1.0);
}

TEST(CartPole, FallingPaysPenalty) {
  CartPole env(0);
  env.set_state({0.0, 0.0, 13.0 * std::numbers::pi / 180.0, 0.0});
  const StepResult r = env.step(0);
  EXPECT_TRUE(r.terminal);
  EXPECT_EQ(r.shaped_reward, -1000.0);
  EXPECT_EQ(r.raw_reward, 1.0);
  EXPECT_THROW(env.step(0), UsageError);

  env.set_state({2.45, 0.0, 0.0, 0.0});
  EXPECT_EQ(env.step(1).shaped_reward, -1000.0);
}

TEST(CartPole, EpisodeCapIsNotAFall) {
  CartPole env(0);
  env.set_state({});
  double raw = 0.0;
  StepResult r;
  std::uint32_t steps = 0;
  do {
    const auto& s = env.state();
    // simple damping controller keeps the pole upright
    r = env.step(s.theta + 0.5 * s.theta_dot + 0.01 * s.x + 0.05 * s.x_dot > 0.0 ? 1 : 0);
    raw += r.raw_reward;
    ++steps;
    ASSERT_TRUE(r.shaped_reward == 1.0);
  } while (!r.terminal);
  EXPECT_EQ(steps, 500u);
  EXPECT_EQ(raw, 500.0);
}

TEST(CartPole, UprightWithoutForceIsAFixedPoint) {
  CartPoleState s;
  for (int i = 0; i < 10000; ++i) s = CartPole::integrate(s, 0.0);
  EXPECT_EQ(s, CartPoleState{});
}

TEST(CartPoleProperty, RandomPolicyFallsQuickly) {
  CartPole env(11);
  Rng policy(12);
  std::bernoulli_distribution right(0.5);
  double steps = 0.0;
  for (int e = 0; e < 1000; ++e) {
    env.reset();
    StepResult r;
    do {
      r = env.step(right(policy) ? 1 : 0);
      steps += r.raw_reward;
    } while (!r.terminal);
  }
  EXPECT_LT(steps / 1000.0, 40.0);
}

TEST(Environments, SameSeedSameTrajectory) {
  for (const char* name : {"blackjack", "cartpole"}) {
    auto a = make_environment(name, 21);
    auto b = make_environment(name, 21);
    Rng actions(1);
    for (int e = 0; e < 50; ++e) {
      ASSERT_EQ(a->reset(), b->reset());
      StepResult ra;
      do {
        const auto act = static_cast<std::uint32_t>(actions() % 2);
        ra = a->step(act);
        const StepResult rb = b->step(act);
        ASSERT_EQ(ra.observation, rb.observation);
        ASSERT_EQ(ra.raw_reward, rb.raw_reward);
        ASSERT_EQ(ra.terminal, rb.terminal);
      } while (!ra.terminal);
    }
  }
  EXPECT_THROW(make_environment("lunar", 0), ConfigError);
}

}  // namespace
}  // namespace rlorf
