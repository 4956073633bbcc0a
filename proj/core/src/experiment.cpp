#include "rlorf/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <fstream>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <system_error>
#include <thread>

#include "rlorf/environment.hpp"
#include "rlorf/error.hpp"
#include "rlorf/stats_tests.hpp"

namespace rlorf {

std::string to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::kRlOrf:
      return "rl-orf";
    case AgentKind::kTabular:
      return "tabular";
    case AgentKind::kRandom:
      return "random";
  }
  return "unknown";
}

AgentKind parse_agent_kind(const std::string& name) {
  if (name == "rl-orf") return AgentKind::kRlOrf;
  if (name == "tabular") return AgentKind::kTabular;
  if (name == "random") return AgentKind::kRandom;
  throw ConfigError("unknown agent kind '" + name + "' (expected rl-orf, tabular or random)");
}

void ExperimentConfig::validate() const {
  if (environment != "blackjack" && environment != "cartpole") {
    throw ConfigError("unknown environment '" + environment + "' (expected blackjack or cartpole)");
  }
  agent_config.validate();
  forest_config.validate();
  if (agent == AgentKind::kTabular) {
    tabular_config().validate();
    if (environment != "blackjack") throw ConfigError("the tabular agent supports only blackjack");
  }
  if (episodes == 0) throw ConfigError("episodes must be positive");
  if (restarts == 0) throw ConfigError("restarts must be positive");
}

TabularConfig ExperimentConfig::tabular_config() const {
  return TabularConfig{alpha, agent_config.gamma, agent_config.epsilon, agent_config.epsilon_decay,
                       agent_config.epsilon_min};
}

nlohmann::json to_json(const ExperimentConfig& c) {
  const auto& a = c.agent_config;
  const auto& f = c.forest_config;
  const auto& t = f.tree_config;
  nlohmann::json j;
  j["env"] = c.environment;
  j["agent"] = to_string(c.agent);
  j["gamma"] = a.gamma;
  j["epsilon"] = a.epsilon;
  j["epsilon-decay"] = a.epsilon_decay;
  j["epsilon-min"] = a.epsilon_min;
  j["batch-size"] = a.batch_size;
  j["memory-capacity"] = a.memory_capacity;
  j["expand-at"] = a.expand_at_episode.value_or(0);
  j["learn-start"] = a.effective_learn_start();
  j["m-init"] = f.m_init;
  j["m-max"] = f.m_max;
  j["phi"] = f.phi;
  j["lambda-window"] = f.lambda_window;
  j["mu"] = f.mu;
  j["poisson-rate"] = f.poisson_rate;
  j["eta"] = t.eta;
  j["beta"] = t.beta;
  j["tests-per-feature"] = t.num_tests_per_feature;
  j["max-depth"] = t.max_depth.value_or(0);
  j["warmup-count"] = t.warmup_count;
  j["relative-gain"] = t.relative_gain;
  j["alpha"] = c.alpha;
  j["episodes"] = c.episodes;
  j["restarts"] = c.restarts;
  j["seed"] = c.seed;
  return j;
}

std::uint64_t restart_seed(std::uint64_t master_seed, std::uint32_t run) {
  return derive_seed(master_seed, 0x1000 + static_cast<std::uint64_t>(run));
}

RunRecord run_restart(const ExperimentConfig& config, std::uint32_t run) {
  const std::uint64_t seed = restart_seed(config.seed, run);
  auto env = make_environment(config.environment, derive_seed(seed, 1));

  if (config.agent == AgentKind::kTabular) {
    return run_tabular_experiment(config.tabular_config(), *env, config.episodes,
                                  derive_seed(seed, 2), run);
  }

  RunRecord record;
  record.run_id = run;
  record.rewards.reserve(config.episodes);
  record.epsilons.reserve(config.episodes);
  record.forest_sizes.reserve(config.episodes);

  if (config.agent == AgentKind::kRandom) {
    Rng rng(derive_seed(seed, 2));
    std::uniform_int_distribution<std::uint32_t> any(0, env->action_count() - 1);
    for (std::uint32_t e = 0; e < config.episodes; ++e) {
      env->reset();
      double total = 0.0;
      for (bool done = false; !done;) {
        const StepResult step = env->step(any(rng));
        total += step.raw_reward;
        done = step.terminal;
      }
      record.rewards.push_back(total);
      record.epsilons.push_back(1.0);
      record.forest_sizes.push_back(0);
    }
    return record;
  }

  Agent agent(config.agent_config, config.forest_config, env->observation_dim(),
              env->action_count(), derive_seed(seed, 2));
  for (std::uint32_t e = 0; e < config.episodes; ++e) {
    record.epsilons.push_back(agent.epsilon());
    record.rewards.push_back(agent.run_episode(*env));
    record.forest_sizes.push_back(static_cast<std::uint32_t>(agent.forests().front().size()));
  }
  return record;
}

std::vector<RunRecord> run_experiment(const ExperimentConfig& config,
                                      const std::function<void(const RunRecord&)>& on_complete) {
  config.validate();
  std::vector<RunRecord> records(config.restarts);
  std::atomic<std::uint32_t> next{0};
  std::mutex mutex;
  std::exception_ptr failure;

  auto worker = [&] {
    for (;;) {
      const std::uint32_t run = next.fetch_add(1);
      if (run >= config.restarts) return;
      try {
        RunRecord r = run_restart(config, run);
        std::lock_guard lock(mutex);
        if (on_complete) on_complete(r);
        records[run] = std::move(r);
      } catch (...) {
        std::lock_guard lock(mutex);
        if (!failure) failure = std::current_exception();
        next.store(config.restarts);
        return;
      }
    }
  };

  std::uint32_t threads = config.threads != 0 ? config.threads : std::thread::hardware_concurrency();
  threads = std::clamp<std::uint32_t>(threads, 1, config.restarts);
  if (threads == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (std::uint32_t i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);
  return records;
}

double trailing_window_sum(const RunRecord& record, std::uint32_t episode) {
  if (episode < kWindow || episode > record.rewards.size()) {
    throw std::out_of_range("trailing window needs 100 <= episode <= run length");
  }
  double sum = 0.0;
  for (std::uint32_t e = episode - kWindow; e < episode; ++e) sum += record.rewards[e];
  return sum;
}

Summary aggregate(const std::vector<RunRecord>& records) {
  if (records.empty()) throw std::invalid_argument("aggregate: no run records");
  const std::size_t episodes = records.front().rewards.size();
  for (const RunRecord& r : records) {
    if (r.rewards.size() != episodes || r.epsilons.size() != episodes || r.forest_sizes.size() != episodes) {
      throw std::invalid_argument("aggregate: ragged run records");
    }
  }
  Summary s;
  s.runs = records.size();
  s.episodes = static_cast<std::uint32_t>(episodes);

  std::vector<double> sums(records.size());
  for (std::size_t e = kWindow; e <= episodes; ++e) {
    for (std::size_t i = 0; i < records.size(); ++i) {
      // same summation order as trailing_window_sum
      double sum = 0.0;
      for (std::size_t k = e - kWindow; k < e; ++k) sum += records[i].rewards[k];
      sums[i] = sum;
    }
    const SampleSummary st = summarize(sums);
    s.windows.push_back({static_cast<std::uint32_t>(e), st.mean, st.sd});
  }
  if (!s.windows.empty()) {
    s.final_window = s.windows.back();
    for (const RunRecord& r : records) s.final_window_sums.push_back(trailing_window_sum(r, s.episodes));
  }
  std::vector<double> last;
  for (const RunRecord& r : records) last.push_back(r.rewards.back());
  const SampleSummary fl = summarize(last);
  s.final_episode_mean = fl.mean;
  s.final_episode_sd = fl.sd;
  return s;
}

nlohmann::json to_json(const Summary& s) {
  nlohmann::json j;
  j["runs"] = s.runs;
  j["episodes"] = s.episodes;
  j["window"] = kWindow;
  j["metric"] = "trailing-100-episode raw reward sum per run; mean and sample sd across runs";
  nlohmann::json windows = nlohmann::json::array();
  for (const WindowStat& w : s.windows) windows.push_back({{"episode", w.episode}, {"mean", w.mean}, {"sd", w.sd}});
  j["windows"] = std::move(windows);
  nlohmann::json fin;
  fin["episode"] = s.episodes;
  if (s.final_window) {
    fin["window_sum_mean"] = s.final_window->mean;
    fin["window_sum_sd"] = s.final_window->sd;
    fin["window_sums"] = s.final_window_sums;
  } else {
    fin["window_sum_mean"] = nullptr;
    fin["window_sum_sd"] = nullptr;
    fin["window_sums"] = nlohmann::json::array();
  }
  fin["episode_reward_mean"] = s.final_episode_mean;
  fin["episode_reward_sd"] = s.final_episode_sd;
  j["final"] = std::move(fin);
  return j;
}

Summary summary_from_json(const nlohmann::json& j) {
  Summary s;
  s.runs = j.at("runs").get<std::size_t>();
  s.episodes = j.at("episodes").get<std::uint32_t>();
  for (const auto& w : j.at("windows")) {
    s.windows.push_back({w.at("episode").get<std::uint32_t>(), w.at("mean").get<double>(), w.at("sd").get<double>()});
  }
  const auto& fin = j.at("final");
  s.final_window_sums = fin.at("window_sums").get<std::vector<double>>();
  if (!fin.at("window_sum_mean").is_null()) {
    s.final_window = WindowStat{s.episodes, fin.at("window_sum_mean").get<double>(),
                                fin.at("window_sum_sd").get<double>()};
  }
  s.final_episode_mean = fin.at("episode_reward_mean").get<double>();
  s.final_episode_sd = fin.at("episode_reward_sd").get<double>();
  return s;
}

std::string format_double(double v) {
  char buf[64];
  const auto [end, ec] = std::to_chars(buf, buf + sizeof(buf), v);
  if (ec != std::errc{}) throw std::runtime_error("format_double failed");
  return std::string(buf, end);
}

std::string runs_csv(const std::vector<RunRecord>& records) {
  std::vector<const RunRecord*> sorted;
  for (const RunRecord& r : records) sorted.push_back(&r);
  std::sort(sorted.begin(), sorted.end(), [](auto* a, auto* b) { return a->run_id < b->run_id; });
  std::string out = "run_id,episode,reward,epsilon,forest_size\n";
  for (const RunRecord* r : sorted) {
    for (std::size_t e = 0; e < r->rewards.size(); ++e) {
      out += std::to_string(r->run_id);
      out += ',';
      out += std::to_string(e + 1);
      out += ',';
      out += format_double(r->rewards[e]);
      out += ',';
      out += format_double(e < r->epsilons.size() ? r->epsilons[e] : 0.0);
      out += ',';
      out += std::to_string(e < r->forest_sizes.size() ? r->forest_sizes[e] : 0);
      out += '\n';
    }
  }
  return out;
}

std::string curve_csv(const Summary& s) {
  std::string out = "episode,mean,sd\n";
  for (const WindowStat& w : s.windows) {
    out += std::to_string(w.episode) + ',' + format_double(w.mean) + ',' + format_double(w.sd) + '\n';
  }
  return out;
}

namespace {

template <typename T>
T parse_field(std::string_view field, std::size_t line) {
  T value{};
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc{} || ptr != field.data() + field.size()) {
    throw std::invalid_argument("runs.csv line " + std::to_string(line) + ": bad field '" +
                                std::string(field) + "'");
  }
  return value;
}

}  // namespace

std::vector<RunRecord> parse_runs_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "run_id,episode,reward,epsilon,forest_size") {
    throw std::invalid_argument("runs.csv: missing or unexpected header");
  }
  std::vector<RunRecord> records;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> fields;
    std::string_view rest(line);
    for (;;) {
      const auto comma = rest.find(',');
      fields.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (fields.size() != 5) throw std::invalid_argument("runs.csv line " + std::to_string(line_no) + ": expected 5 fields");
    const auto run_id = parse_field<std::uint32_t>(fields[0], line_no);
    const auto episode = parse_field<std::uint32_t>(fields[1], line_no);
    if (records.empty() || records.back().run_id != run_id) {
      records.push_back(RunRecord{run_id, {}, {}, {}});
    }
    RunRecord& r = records.back();
    if (episode != r.rewards.size() + 1) {
      throw std::invalid_argument("runs.csv line " + std::to_string(line_no) + ": episodes out of order");
    }
    r.rewards.push_back(parse_field<double>(fields[2], line_no));
    r.epsilons.push_back(parse_field<double>(fields[3], line_no));
    r.forest_sizes.push_back(parse_field<std::uint32_t>(fields[4], line_no));
  }
  return records;
}

namespace {

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << contents;
  out.close();
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

void write_outputs(const std::vector<RunRecord>& records, const Summary& summary,
                   const std::filesystem::path& directory, const OutputMetadata& meta,
                   bool write_curve) {
  std::error_code ec;
  std::filesystem::create_directories(directory, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + directory.string() + ": " + ec.message());

  write_file(directory / "runs.csv", runs_csv(records));
  nlohmann::json j = to_json(summary);
  j["config"] = meta.config ? *meta.config : nlohmann::json(nullptr);
  j["seed"] = meta.seed ? nlohmann::json(*meta.seed) : nlohmann::json(nullptr);
  j["wall_clock_seconds"] = meta.wall_clock_seconds ? nlohmann::json(*meta.wall_clock_seconds) : nlohmann::json(nullptr);
  write_file(directory / "summary.json", j.dump(2) + "\n");
  if (write_curve) write_file(directory / "curve.csv", curve_csv(summary));
}

}  // namespace rlorf
