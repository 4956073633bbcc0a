#include <gtest/gtest.h>

#include <array>
#include <cmath>
#include <map>

#include "rlorf/blackjack.hpp"
#include "rlorf/cartpole.hpp"
#include "rlorf/error.hpp"
#include "rlorf/tabular.hpp"

namespace rlorf {
namespace {

const Observation kS{15, 4, 0};
const Observation kNext{19, 4, 0};

TEST(TabularUpdate, TerminalRewardMovesByAlpha) {
  QTable q(2);
  tabular_update(q, {kS, 1, 1.0, kNext, true}, 0.1, 1.0);
  EXPECT_DOUBLE_EQ(q.value(QTable::key(kS), 1), 0.1);
  EXPECT_EQ(q.value(QTable::key(kS), 0), 0.0);
}

TEST(TabularUpdate, FullStepOverwrites) {
  QTable q(2);
  q.set(QTable::key(kS), 0, 0.7);
  tabular_update(q, {kS, 0, -1.0, kNext, true}, 1.0, 1.0);
  EXPECT_EQ(q.value(QTable::key(kS), 0), -1.0);
}

TEST(TabularUpdate, BootstrapsFromNextState) {
  QTable q(2);
  q.set(QTable::key(kNext), 1, 0.5);
  q.set(QTable::key(kNext), 0, -0.2);
  tabular_update(q, {kS, 0, 0.0, kNext, false}, 0.1, 1.0);
  EXPECT_DOUBLE_EQ(q.value(QTable::key(kS), 0), 0.05);

  QTable terminal(2);
  terminal.set(QTable::key(kNext), 1, 0.5);
  tabular_update(terminal, {kS, 0, 0.0, kNext, true}, 0.1, 1.0);
  EXPECT_EQ(terminal.value(QTable::key(kS), 0), 0.0);
}

TEST(QTable, KeysMustBeIntegral) {
  EXPECT_EQ(QTable::key(kS), (QTable::Key{15, 4, 0}));
  EXPECT_THROW(QTable::key(Observation{0.5, 1.0}), ConfigError);
  EXPECT_THROW(QTable::key(Observation{NAN}), ConfigError);
}

TEST(TabularExperiment, ShapeContract) {
  TabularConfig cfg;
  for (std::uint32_t run = 0; run < 20; ++run) {
    Blackjack env(run);
    const RunRecord r = run_tabular_experiment(cfg, env, 1000, run, run);
    ASSERT_EQ(r.run_id, run);
    ASSERT_EQ(r.rewards.size(), 1000u);
    ASSERT_EQ(r.epsilons.size(), 1000u);
    ASSERT_EQ(r.forest_sizes.size(), 1000u);
    for (double v : r.rewards) ASSERT_TRUE(v == -1.0 || v == 0.0 || v == 1.0);
    ASSERT_EQ(r.epsilons.front(), 0.5);
  }
}

TEST(TabularExperiment, GreedyOnEmptyTableSticks) {
  TabularConfig cfg;
  cfg.epsilon = 0.0;
  cfg.epsilon_min = 0.0;
  // 20 against a dealer 17: sticking wins, hitting almost always busts
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    Blackjack env(seed, {10, 10, 10, 7});
    EXPECT_EQ(run_tabular_experiment(cfg, env, 1, seed).rewards[0], 1.0);
  }
}

TEST(TabularExperiment, RejectsContinuousEnvironment) {
  CartPole env(0);
  EXPECT_THROW(run_tabular_experiment({}, env, 10, 0), ConfigError);
  Blackjack bj(0);
  TabularConfig bad;
  bad.alpha = 0.0;
  EXPECT_THROW(run_tabular_experiment(bad, bj, 10, 0), ConfigError);
}

TEST(TabularProperty, ValuesStayBoundedAndUnvisitedStayZero) {
  for (double alpha : {0.1, 0.5, 1.0}) {
    QTable q(2);
    Blackjack env(static_cast<std::uint64_t>(alpha * 10));
    Rng rng(1);
    std::map<QTable::Key, std::array<bool, 2>> visited;
    for (int e = 0; e < 20000; ++e) {
      Observation s = env.reset();
      for (;;) {
        const auto a = static_cast<std::uint32_t>(rng() % 2);
        const StepResult r = env.step(a);
        visited[QTable::key(s)][a] = true;
        tabular_update(q, {s, a, r.shaped_reward, r.observation, r.terminal}, alpha, 1.0);
        if (r.terminal) break;
        s = r.observation;
      }
    }
    for (const auto& [key, values] : q.entries()) {
      for (std::uint32_t a = 0; a < 2; ++a) {
        ASSERT_LE(std::abs(values[a]), 1.0 + 1e-12);
        if (!visited[key][a]) ASSERT_EQ(values[a], 0.0);
      }
    }
    EXPECT_EQ(q.values(QTable::Key{40, 40, 40}), (std::vector<double>{0.0, 0.0}));
  }
}

}  // namespace
}  // namespace rlorf
