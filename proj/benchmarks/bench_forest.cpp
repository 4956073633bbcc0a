#include <benchmark/benchmark.h>

#include <array>
#include <vector>

#include "rlorf/agent.hpp"
#include "rlorf/blackjack.hpp"
#include "rlorf/cartpole.hpp"
#include "rlorf/online_forest.hpp"
#include "rlorf/online_tree.hpp"

namespace {

std::vector<std::array<double, 4>> make_stream(std::size_t n) {
  rlorf::Rng rng(7);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<std::array<double, 4>> out(n);
  for (auto& x : out) x = {u(rng), u(rng), u(rng), u(rng)};
  return out;
}

double target(const std::array<double, 4>& x) { return 3.0 * x[0] - x[1] * x[2] + (x[3] > 0 ? 10.0 : 0.0); }

void BM_TreeUpdate(benchmark::State& state) {
  const auto stream = make_stream(1 << 14);
  rlorf::TreeConfig cfg;
  cfg.eta = static_cast<std::uint32_t>(state.range(0));
  rlorf::OnlineTree tree(cfg, 4, 1);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& x = stream[i++ & (stream.size() - 1)];
    tree.update(x, target(x));
  }
  state.counters["leaves"] = static_cast<double>(tree.leaf_count());
}
BENCHMARK(BM_TreeUpdate)->Arg(32)->Arg(256);

void BM_ForestUpdate(benchmark::State& state) {
  const auto stream = make_stream(1 << 14);
  rlorf::ForestConfig cfg;
  cfg.m_init = static_cast<std::uint32_t>(state.range(0));
  cfg.m_max = cfg.m_init;
  rlorf::OnlineForest forest(cfg, 4, 1);
  std::size_t i = 0;
  for (auto _ : state) {
    const auto& x = stream[i++ & (stream.size() - 1)];
    forest.update(x, target(x));
  }
}
BENCHMARK(BM_ForestUpdate)->Arg(100)->Arg(200);

void BM_ForestPredict(benchmark::State& state) {
  const auto stream = make_stream(1 << 14);
  rlorf::ForestConfig cfg;
  cfg.m_max = 200;
  rlorf::OnlineForest forest(cfg, 4, 1);
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& x : stream) forest.update(x, target(x));
  }
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(forest.predict(stream[i++ & (stream.size() - 1)]));
  }
}
BENCHMARK(BM_ForestPredict);

void BM_BlackjackEpisodes(benchmark::State& state) {
  rlorf::AgentConfig agent_cfg;
  agent_cfg.expand_at_episode = 100;
  rlorf::Agent agent(agent_cfg, rlorf::ForestConfig{}, 3, 2, 11);
  rlorf::Blackjack env(12);
  for (auto _ : state) benchmark::DoNotOptimize(agent.run_episode(env));
}
BENCHMARK(BM_BlackjackEpisodes)->Iterations(1000)->Unit(benchmark::kMillisecond);

void BM_CartPoleEpisodes(benchmark::State& state) {
  rlorf::AgentConfig agent_cfg;
  agent_cfg.expand_at_episode = 100;
  rlorf::ForestConfig forest_cfg;
  forest_cfg.tree_config.eta = 256;
  rlorf::Agent agent(agent_cfg, forest_cfg, 4, 2, 11);
  rlorf::CartPole env(12);
  for (auto _ : state) benchmark::DoNotOptimize(agent.run_episode(env));
}
BENCHMARK(BM_CartPoleEpisodes)->Iterations(200)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
