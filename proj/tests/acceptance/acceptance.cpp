// End-to-end acceptance run. Prints one PASS/FAIL line per criterion and exits
// non-zero if any criterion fails. Pass criterion numbers as arguments to run a
// subset, e.g. `rlorf_acceptance 5 6 7`.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "oracles/oracles.hpp"
#include "rlorf/agent.hpp"
#include "rlorf/blackjack.hpp"
#include "rlorf/cartpole.hpp"
#include "rlorf/experiment.hpp"
#include "rlorf/online_forest.hpp"
#include "rlorf/online_tree.hpp"
#include "rlorf/replay_memory.hpp"
#include "rlorf/stats_tests.hpp"

namespace {

using namespace rlorf;

constexpr std::uint64_t kSeed = 1;
constexpr std::uint32_t kBlackjackRestarts = 100;
constexpr std::uint32_t kCartPoleRestarts = 20;
constexpr std::uint32_t kExpansionPairs = 10;

struct Verdict {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 3) {
  std::ostringstream ss;
  ss.precision(digits);
  ss << std::fixed << v;
  return ss.str();
}

std::string sci(double v) {
  std::ostringstream ss;
  ss.precision(2);
  ss << std::scientific << v;
  return ss.str();
}

void progress(const std::string& what) {
  std::cerr << "[acceptance] " << what << std::endl;
}

ExperimentConfig base_config(const std::string& env, AgentKind agent, std::uint32_t restarts) {
  ExperimentConfig c;
  c.environment = env;
  c.agent = agent;
  c.restarts = restarts;
  c.episodes = 1000;
  c.seed = kSeed;
  return c;
}

ExperimentConfig blackjack_orf() {
  ExperimentConfig c = base_config("blackjack", AgentKind::kRlOrf, kBlackjackRestarts);
  c.forest_config.tree_config.eta = 32;
  c.agent_config.expand_at_episode = 100;
  return c;
}

ExperimentConfig cartpole_orf(bool expand, std::uint32_t restarts) {
  ExperimentConfig c = base_config("cartpole", AgentKind::kRlOrf, restarts);
  c.forest_config.tree_config.eta = 256;
  if (expand) c.agent_config.expand_at_episode = 100;
  return c;
}

// Memoized experiments shared between criteria.
struct Runs {
  std::vector<double> final_sums(const ExperimentConfig& c, const std::string& label) {
    const std::string key = to_json(c).dump();
    if (auto it = cache.find(key); it != cache.end()) return it->second;
    progress("running " + label + " (" + std::to_string(c.restarts) + " restarts)");
    const auto start = std::chrono::steady_clock::now();
    std::uint32_t done = 0;
    const auto records = run_experiment(c, [&](const RunRecord&) {
      ++done;
      if (done % 5 == 0 || done == c.restarts) progress("  " + label + " " + std::to_string(done) + "/" + std::to_string(c.restarts));
    });
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    progress("  " + label + " took " + fmt(secs, 1) + " s");
    auto sums = aggregate(records).final_window_sums;
    cache.emplace(key, sums);
    return sums;
  }
  std::map<std::string, std::vector<double>> cache;
};

Runs runs;

Verdict criterion1() {
  const auto sums = runs.final_sums(blackjack_orf(), "blackjack rl-orf");
  const auto s = summarize(sums);
  return {s.mean >= -13.0 && s.mean <= 0.0,
          "blackjack rl-orf trailing-100 sum at episode 1000: mean " + fmt(s.mean) + " sd " + fmt(s.sd) +
              " over " + std::to_string(s.n) + " restarts, required in [-13, 0]"};
}

Verdict criterion2() {
  const auto orf = runs.final_sums(blackjack_orf(), "blackjack rl-orf");
  const auto tab = runs.final_sums(base_config("blackjack", AgentKind::kTabular, kBlackjackRestarts),
                                   "blackjack tabular");
  const auto so = summarize(orf);
  const auto st = summarize(tab);
  const auto welch = welch_t_test(orf, tab, true);
  const bool band = st.mean >= -36.0 && st.mean <= -22.0;
  const bool order = so.mean > st.mean;
  const bool significant = welch.p < 0.05;
  return {band && order && significant,
          "tabular mean " + fmt(st.mean) + " sd " + fmt(st.sd) + " (required in [-36, -22]: " +
              (band ? "ok" : "no") + "); rl-orf " + fmt(so.mean) + " > tabular: " + (order ? "ok" : "no") +
              "; one-sided Welch p " + fmt(welch.p, 6) + " < 0.05: " + (significant ? "ok" : "no")};
}

Verdict criterion3() {
  const auto orf = runs.final_sums(cartpole_orf(true, kCartPoleRestarts), "cartpole rl-orf with expansion");
  const auto rnd = runs.final_sums(base_config("cartpole", AgentKind::kRandom, kCartPoleRestarts),
                                   "cartpole random policy");
  const double orf_len = summarize(orf).mean / kWindow;
  const double rnd_len = summarize(rnd).mean / kWindow;
  return {orf_len > 5.0 * rnd_len,
          "cartpole mean episode length over episodes 901-1000: rl-orf " + fmt(orf_len, 2) + " (sd " +
              fmt(summarize(orf).sd / kWindow, 2) + ", " + std::to_string(orf.size()) + " restarts), random " +
              fmt(rnd_len, 2) + "; required > 5x random = " + fmt(5.0 * rnd_len, 2)};
}

Verdict criterion4() {
  auto with = runs.final_sums(cartpole_orf(true, kCartPoleRestarts), "cartpole rl-orf with expansion");
  const auto without = runs.final_sums(cartpole_orf(false, kExpansionPairs), "cartpole rl-orf without expansion");
  // restart i has the same seed in both runs, so the first pairs line up
  std::uint32_t wins = 0;
  for (std::size_t i = 0; i < without.size(); ++i) wins += with[i] >= without[i];
  const double frac = static_cast<double>(wins) / static_cast<double>(without.size());
  return {without.size() >= 10 && frac >= 0.7,
          "expansion >= no expansion in " + std::to_string(wins) + "/" + std::to_string(without.size()) +
              " seed pairs (" + fmt(100.0 * frac, 0) + "%), required >= 70%"};
}

// (a) node statistics, (b) split gain, (c) Mann-Whitney exact p, (d) Welch p.
Verdict criterion5() {
  std::vector<std::string> failures;
  auto rel = [](double a, double b) { return std::abs(a - b) / std::max(1.0, std::abs(b)); };

  double worst_stats = 0.0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    Rng rng(seed + 500);
    const std::uint32_t d = 1 + static_cast<std::uint32_t>(seed % 4);
    std::uniform_real_distribution<double> u(-3.0, 3.0);
    std::normal_distribution<double> noise(0.0, 1.0);
    std::vector<oracle::Observation> stream(400 + 5 * seed);
    for (auto& o : stream) {
      for (std::uint32_t f = 0; f < d; ++f) o.x.push_back(u(rng));
      o.y = 10.0 * (o.x[0] > 0.0) + o.x[d - 1] + noise(rng);
    }
    TreeConfig cfg;
    cfg.eta = 4 + static_cast<std::uint32_t>(seed % 30);
    OnlineTree tree(cfg, d, seed);
    for (const auto& o : stream) tree.update(o.x, o.y);
    const auto expected = oracle::brute_force_node_stats(tree, stream);
    for (std::size_t i = 0; i < tree.node_count(); ++i) {
      const auto& got = tree.nodes()[i].stats;
      if (got.count != expected[i].count) {
        worst_stats = INFINITY;
        continue;
      }
      worst_stats = std::max({worst_stats, rel(got.sum_y, expected[i].sum), rel(got.sum_y_sq, expected[i].sum_sq),
                              rel(got.rss(), expected[i].rss)});
    }
  }
  if (!(worst_stats <= 1e-9)) failures.push_back("(a) node stats rel err " + sci(worst_stats));

  double worst_gain = 0.0;
  const std::vector<double> ys{0.5, -2.0, 3.25, 7.0, -1.5, 4.0, 0.0};
  for (unsigned mask = 0; mask < (1u << ys.size()); ++mask) {
    std::vector<double> left, right;
    SplitTest t;
    RunningStats parent;
    for (std::size_t i = 0; i < ys.size(); ++i) {
      parent.push(ys[i]);
      if (mask >> i & 1u) {
        left.push_back(ys[i]);
        t.left_stats.push(ys[i]);
      } else {
        right.push_back(ys[i]);
        t.right_stats.push(ys[i]);
      }
    }
    double expected = 0.0;
    if (!left.empty() && !right.empty()) {
      expected = std::max(0.0, oracle::batch_stats(ys).rss - oracle::batch_stats(left).rss -
                                   oracle::batch_stats(right).rss);
    }
    worst_gain = std::max(worst_gain, std::abs(rss_gain(parent, t) - expected));
  }
  if (!(worst_gain <= 1e-9)) failures.push_back("(b) rss gain abs err " + sci(worst_gain));

  double worst_mw = 0.0;
  Rng rng(77);
  std::uniform_real_distribution<double> u01(0.0, 1.0);
  for (std::size_t na = 1; na <= 5; ++na) {
    for (std::size_t nb = 1; nb <= 5; ++nb) {
      for (int rep = 0; rep < 5; ++rep) {
        std::vector<double> a(na), b(nb);
        for (double& v : a) v = u01(rng) + 0.15 * rep;
        for (double& v : b) v = u01(rng);
        worst_mw = std::max(worst_mw, std::abs(mann_whitney_u(a, b).p - oracle::exact_mann_whitney_p(a, b)));
      }
    }
  }
  if (!(worst_mw <= 1e-12)) failures.push_back("(c) Mann-Whitney p err " + sci(worst_mw));

  double worst_welch = 0.0;
  for (int pair = 0; pair < 3; ++pair) {
    std::normal_distribution<double> da(1.0 * pair, 1.0 + 0.5 * pair);
    std::normal_distribution<double> db(0.3, 1.5);
    std::vector<double> a(6 + 4 * pair), b(15 - 3 * pair);
    for (double& v : a) v = da(rng);
    for (double& v : b) v = db(rng);
    const auto r = welch_t_test(a, b, true);
    worst_welch = std::max(worst_welch, std::abs(r.p - (1.0 - oracle::student_t_cdf(r.t, r.df))));
  }
  if (!(worst_welch <= 1e-6)) failures.push_back("(d) Welch p err " + sci(worst_welch));

  std::string detail = "node stats max rel err " + sci(worst_stats) + ", rss gain max err " + sci(worst_gain) +
                       ", Mann-Whitney max p err " + sci(worst_mw) + ", Welch max p err " + sci(worst_welch);
  for (const auto& f : failures) detail += "; FAILED " + f;
  return {failures.empty(), detail};
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Verdict criterion6() {
  std::vector<std::string> failures;

  // OOBE range and forest size bounds under replacement churn and expansion
  {
    ForestConfig cfg;
    cfg.m_init = 20;
    cfg.m_max = 40;
    cfg.phi = 1.0 / 200.0;
    cfg.tree_config.eta = 8;
    OnlineForest forest(cfg, 3, 3);
    Rng rng(4);
    std::uniform_real_distribution<double> u(-1.0, 1.0);
    bool ok = true;
    for (int i = 0; i < 20000 && ok; ++i) {
      if (i == 10000) forest.expand();
      const std::vector<double> x{u(rng), u(rng), u(rng)};
      forest.update(x, (x[0] > 0 ? -1000.0 : 1.0) + 0.1 * x[1]);
      ok = forest.size() >= cfg.m_init && forest.size() <= cfg.m_max;
      for (const auto& t : forest.trees()) ok = ok && t.oobe() >= 0.0 && t.oobe() <= 1.0;
    }
    if (!ok) failures.push_back("OOBE or forest size out of bounds");
    if (forest.replacements() == 0) failures.push_back("no replacement exercised");
  }

  // bagging zero-draw rate
  double zero_rate = 0.0;
  {
    ForestConfig cfg;
    cfg.m_init = 1;
    cfg.m_max = 1;
    cfg.phi = 1e-9;
    OnlineForest forest(cfg, 1, 8);
    const std::vector<double> x{0.0};
    for (int i = 0; i < 100000; ++i) forest.update(x, 1.0);
    zero_rate = static_cast<double>(forest.zero_draws()) / static_cast<double>(forest.bagging_draws());
    if (std::abs(zero_rate - std::exp(-1.0)) > 0.01) failures.push_back("Poisson zero rate " + fmt(zero_rate, 4));
  }

  // replay ring keeps exactly the last N
  {
    ReplayMemory memory(100);
    for (int i = 0; i < 250; ++i) memory.push({{static_cast<double>(i)}, 0, 0.0, {}, false});
    const auto c = memory.contents();
    bool ok = c.size() == 100;
    for (std::size_t i = 0; ok && i < c.size(); ++i) ok = c[i].state[0] == 150.0 + static_cast<double>(i);
    if (!ok) failures.push_back("replay ring contents");
  }

  // epsilon schedule
  {
    AgentConfig a;
    a.epsilon_decay = 0.9;
    ForestConfig f;
    f.m_init = 3;
    f.m_max = 3;
    Agent agent(a, f, 3, 2, 5);
    Blackjack env(5);
    double prev = agent.epsilon();
    bool ok = true;
    for (int e = 0; e < 100; ++e) {
      agent.run_episode(env);
      ok = ok && agent.epsilon() <= prev && agent.epsilon() >= a.epsilon_min;
      prev = agent.epsilon();
    }
    if (!ok || agent.epsilon() != a.epsilon_min) failures.push_back("epsilon schedule");
  }

  // byte-identical outputs for a fixed seed
  {
    ExperimentConfig c = base_config("blackjack", AgentKind::kRlOrf, 2);
    c.episodes = 200;
    c.forest_config.m_init = 10;
    c.forest_config.m_max = 20;
    c.agent_config.expand_at_episode = 100;
    const auto root = std::filesystem::temp_directory_path() / "rlorf_acceptance_determinism";
    std::filesystem::remove_all(root);
    for (const char* sub : {"a", "b"}) {
      const auto records = run_experiment(c);
      write_outputs(records, aggregate(records), root / sub, {to_json(c), c.seed, std::nullopt});
    }
    for (const char* file : {"runs.csv", "summary.json", "curve.csv"}) {
      const std::string a = slurp(root / "a" / file);
      if (a.empty() || a != slurp(root / "b" / file)) failures.push_back(std::string("outputs differ: ") + file);
    }
    std::filesystem::remove_all(root);
  }

  std::string detail = "OOBE in [0,1], size in [m_init, m_max], zero-draw rate " + fmt(zero_rate, 4) +
                       " (e^-1 = 0.3679), replay ring, epsilon floor, byte-identical outputs";
  for (const auto& f : failures) detail += "; FAILED " + f;
  return {failures.empty(), detail};
}

Verdict criterion7() {
  std::vector<std::string> failures;

  double mean_reward = 0.0;
  {
    Blackjack env(kSeed);
    Rng policy(kSeed + 1);
    const int episodes = 100000;
    double total = 0.0;
    for (int e = 0; e < episodes; ++e) {
      env.reset();
      StepResult r;
      do {
        r = env.step(static_cast<std::uint32_t>(policy() & 1u));
      } while (!r.terminal);
      total += r.raw_reward;
    }
    mean_reward = total / episodes;
    if (!(mean_reward < 0.0)) failures.push_back("blackjack random policy mean " + fmt(mean_reward, 4));
  }

  double step_err = 0.0;
  {
    CartPole env(0);
    env.set_state({});
    const auto r = env.step(1);
    const auto expected = oracle::cartpole_step_from_rest_right();
    for (int i = 0; i < 4; ++i) step_err = std::max(step_err, std::abs(r.observation[i] - expected[i]));
    if (!(step_err <= 1e-6)) failures.push_back("Euler step err " + sci(step_err));
  }

  {
    // a single step away from each bound, with zero velocity the position barely moves
    const double lim = CartPole::kThetaLimit;
    struct Case {
      CartPoleState s;
      bool fall;
    };
    const std::vector<Case> cases{
        {{0.0, 0.0, lim + 0.01, 0.0}, true},   {{0.0, 0.0, -lim - 0.01, 0.0}, true},
        {{2.41, 0.0, 0.0, 0.0}, true},         {{-2.41, 0.0, 0.0, 0.0}, true},
        {{0.0, 0.0, lim - 0.02, -1.0}, false}, {{2.3, 0.0, 0.0, 0.0}, false},
        {{0.0, 0.0, 0.0, 0.0}, false},
    };
    bool ok = true;
    for (const auto& c : cases) {
      CartPole env(0);
      env.set_state(c.s);
      const auto r = env.step(c.s.x > 0 ? 1 : 0);
      ok = ok && r.terminal == c.fall && r.shaped_reward == (c.fall ? -1000.0 : 1.0) && r.raw_reward == 1.0;
    }
    // the step cap ends the episode without a fall
    CartPole env(0);
    env.set_state({});
    std::uint32_t steps = 0;
    StepResult r;
    do {
      const auto& s = env.state();
      r = env.step(s.theta + 0.5 * s.theta_dot + 0.01 * s.x + 0.05 * s.x_dot > 0.0 ? 1 : 0);
      ++steps;
      ok = ok && r.shaped_reward == 1.0;
    } while (!r.terminal);
    ok = ok && steps == CartPole::kMaxSteps;
    if (!ok) failures.push_back("termination rules");
  }

  std::string detail = "blackjack random-policy mean reward " + fmt(mean_reward, 4) +
                       " over 1e5 episodes, cart-pole Euler step max err " + sci(step_err) +
                       ", termination at |theta| > 12 deg, |x| > 2.4 and the 500-step cap";
  for (const auto& f : failures) detail += "; FAILED " + f;
  return {failures.empty(), detail};
}

}  // namespace

int main(int argc, char** argv) {
  std::set<int> selected;
  for (int i = 1; i < argc; ++i) selected.insert(std::stoi(argv[i]));
  const std::vector<std::pair<int, std::function<Verdict()>>> criteria{
      {5, criterion5}, {6, criterion6}, {7, criterion7}, {1, criterion1},
      {2, criterion2}, {3, criterion3}, {4, criterion4},
  };
  std::map<int, Verdict> verdicts;
  for (const auto& [id, fn] : criteria) {
    if (!selected.empty() && !selected.count(id)) continue;
    try {
      verdicts[id] = fn();
    } catch (const std::exception& e) {
      verdicts[id] = {false, std::string("exception: ") + e.what()};
    }
    std::cout << (verdicts[id].pass ? "PASS" : "FAIL") << " criterion " << id << ": " << verdicts[id].detail
              << std::endl;
  }
  const auto passed = std::count_if(verdicts.begin(), verdicts.end(), [](const auto& v) { return v.second.pass; });
  std::cout << passed << "/" << verdicts.size() << " criteria passed" << std::endl;
  return passed == static_cast<long>(verdicts.size()) ? 0 : 1;
}
