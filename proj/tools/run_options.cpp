#include "run_options.hpp"

#include <algorithm>

#include "rlorf/error.hpp"

namespace rlorf::cli {

void register_run_options(CLI::App& app, RunOptions& o) {
  app.set_config("--config", "", "TOML/INI file with the same keys as the flags");
  app.allow_config_extras(CLI::config_extras_mode::error);

  app.add_option("--env", o.env, "blackjack | cartpole")->capture_default_str();
  app.add_option("--agent", o.agent, "rl-orf | tabular | random")->capture_default_str();
  app.add_option("--gamma", o.gamma, "discount factor")->capture_default_str();
  app.add_option("--epsilon", o.epsilon, "initial exploration rate")->capture_default_str();
  app.add_option("--epsilon-decay", o.epsilon_decay, "per-episode epsilon multiplier")->capture_default_str();
  app.add_option("--epsilon-min", o.epsilon_min, "exploration floor")->capture_default_str();
  app.add_option("--batch-size", o.batch_size, "replay minibatch size")->capture_default_str();
  app.add_option("--memory-capacity", o.memory_capacity, "replay memory size")->capture_default_str();
  app.add_option("--expand-at", o.expand_at, "episode at which forests grow to m-max (0 = never)")
      ->capture_default_str();
  app.add_option("--learn-start", o.learn_start, "transitions stored before learning (0 = batch size)")
      ->capture_default_str();
  app.add_option("--m-init", o.m_init, "initial trees per forest")->capture_default_str();
  app.add_option("--m-max", o.m_max, "maximum trees per forest")->capture_default_str();
  app.add_option("--phi", o.phi, "temporal knowledge weighting rate")->capture_default_str();
  app.add_option("--lambda-window", o.lambda_window, "out-of-bag error window")->capture_default_str();
  app.add_option("--mu", o.mu, "out-of-bag error stabilizer")->capture_default_str();
  app.add_option("--poisson-rate", o.poisson_rate, "online bagging rate")->capture_default_str();
  app.add_option("--eta", o.eta, "samples a leaf must exceed before splitting")->capture_default_str();
  app.add_option("--beta", o.beta, "minimum split gain")->capture_default_str();
  app.add_option("--tests-per-feature", o.tests_per_feature, "candidate thresholds per feature")
      ->capture_default_str();
  app.add_option("--max-depth", o.max_depth, "tree depth limit (0 = unbounded)")->capture_default_str();
  app.add_option("--warmup-count", o.warmup_count, "samples observed before tests are drawn")
      ->capture_default_str();
  app.add_flag("--relative-gain", o.relative_gain, "compare gain / RSS(parent) with beta");
  app.add_option("--alpha", o.alpha, "tabular learning rate")->capture_default_str();
  app.add_option("--episodes", o.episodes, "episodes per restart")->capture_default_str();
  app.add_option("--restarts", o.restarts, "independent restarts")->capture_default_str();
  app.add_option("--seed", o.seed, "master seed")->capture_default_str();
  app.add_option("--output", o.output, "output directory")->capture_default_str();
  app.add_option("--threads", o.threads, "worker threads (0 = all cores)")->capture_default_str();
  app.add_flag("--no-curve", o.no_curve, "skip curve.csv");
}

ExperimentConfig resolve(const RunOptions& o) {
  ExperimentConfig c;
  c.environment = o.env;
  c.agent = parse_agent_kind(o.agent);
  c.agent_config.gamma = o.gamma;
  c.agent_config.epsilon = o.epsilon;
  c.agent_config.epsilon_decay = o.epsilon_decay;
  c.agent_config.epsilon_min = o.epsilon_min;
  c.agent_config.batch_size = o.batch_size;
  c.agent_config.memory_capacity = o.memory_capacity;
  if (o.expand_at != 0) c.agent_config.expand_at_episode = o.expand_at;
  if (o.learn_start != 0) c.agent_config.learn_start = o.learn_start;
  c.forest_config.m_init = o.m_init;
  c.forest_config.m_max = o.m_max;
  c.forest_config.phi = o.phi;
  c.forest_config.lambda_window = o.lambda_window;
  c.forest_config.mu = o.mu;
  c.forest_config.poisson_rate = o.poisson_rate;
  auto& t = c.forest_config.tree_config;
  t.eta = o.eta;
  t.beta = o.beta;
  t.num_tests_per_feature = o.tests_per_feature;
  if (o.max_depth != 0) t.max_depth = o.max_depth;
  t.warmup_count = o.warmup_count;
  t.relative_gain = o.relative_gain;
  c.alpha = o.alpha;
  c.episodes = o.episodes;
  c.restarts = o.restarts;
  c.seed = o.seed;
  c.output = o.output;
  c.threads = o.threads;
  c.write_curve = !o.no_curve;
  c.validate();
  return c;
}

ExperimentConfig parse_config(const std::vector<std::string>& args) {
  CLI::App app("rlorf run");
  RunOptions options;
  register_run_options(app, options);
  // CLI11 consumes a reversed argument vector
  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    throw ConfigError(e.what());
  }
  return resolve(options);
}

}  // namespace rlorf::cli
