// rlorf: run forest Q-learning experiments, re-aggregate them and compare results.
//
//   rlorf run --env blackjack --eta 32 --expand-at 100 --restarts 25 --output out/bj
//   rlorf aggregate --runs out/bj/runs.csv --output out/bj2
//   rlorf compare out/bj/summary.json out/tab/summary.json
//
// Exit status: 0 success, 1 configuration error, 2 runtime error.

#include <chrono>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rlorf/error.hpp"
#include "rlorf/experiment.hpp"
#include "rlorf/stats_tests.hpp"
#include "run_options.hpp"

namespace {

constexpr int kConfigError = 1;
constexpr int kRuntimeError = 2;

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int do_run(const rlorf::ExperimentConfig& config) {
  std::filesystem::create_directories(config.output);
  const auto partial_path = config.output / "runs.partial.csv";
  std::ofstream partial(partial_path, std::ios::binary | std::ios::trunc);
  if (!partial) throw std::runtime_error("cannot open " + partial_path.string());

  const auto start = std::chrono::steady_clock::now();
  std::uint32_t done = 0;
  const auto records = rlorf::run_experiment(config, [&](const rlorf::RunRecord& r) {
    std::string rows = rlorf::runs_csv({r});
    if (done > 0) rows.erase(0, rows.find('\n') + 1);
    partial << rows << std::flush;
    ++done;
    const double tail = r.rewards.size() >= rlorf::kWindow
                            ? rlorf::trailing_window_sum(r, static_cast<std::uint32_t>(r.rewards.size()))
                            : 0.0;
    std::cerr << "restart " << r.run_id << " done (" << done << "/" << config.restarts
              << "), trailing-100 sum " << tail << "\n";
  });
  const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  partial.close();

  const rlorf::Summary summary = rlorf::aggregate(records);
  rlorf::write_outputs(records, summary, config.output,
                       {rlorf::to_json(config), config.seed, seconds}, config.write_curve);
  std::filesystem::remove(partial_path);

  if (summary.final_window) {
    std::cout << "episode " << summary.episodes << ": trailing-100 sum mean "
              << summary.final_window->mean << " sd " << summary.final_window->sd << " over "
              << summary.runs << " restarts (" << seconds << " s)\n";
  }
  return 0;
}

int do_aggregate(const std::filesystem::path& runs, const std::filesystem::path& output, bool curve) {
  const auto records = rlorf::parse_runs_csv(read_file(runs));
  const auto summary = rlorf::aggregate(records);
  rlorf::write_outputs(records, summary, output, {}, curve);
  return 0;
}

int do_compare(const std::filesystem::path& a_path, const std::filesystem::path& b_path) {
  const auto a = rlorf::summary_from_json(nlohmann::json::parse(read_file(a_path)));
  const auto b = rlorf::summary_from_json(nlohmann::json::parse(read_file(b_path)));
  const auto& xa = a.final_window_sums;
  const auto& xb = b.final_window_sums;

  nlohmann::json out;
  const auto sa = rlorf::summarize(xa);
  const auto sb = rlorf::summarize(xb);
  out["a"] = {{"path", a_path.string()}, {"n", sa.n}, {"mean", sa.mean}, {"sd", sa.sd}};
  out["b"] = {{"path", b_path.string()}, {"n", sb.n}, {"mean", sb.mean}, {"sd", sb.sd}};
  try {
    const auto one = rlorf::welch_t_test(xa, xb, true);
    const auto two = rlorf::welch_t_test(xa, xb, false);
    out["welch"] = {{"t", one.t}, {"df", one.df}, {"p_one_sided_a_greater", one.p}, {"p_two_sided", two.p}};
  } catch (const rlorf::StatsError& e) {
    out["welch"] = {{"error", e.what()}};
  }
  try {
    const auto mw = rlorf::mann_whitney_u(xa, xb);
    out["mann_whitney"] = {{"u", mw.u}, {"p_two_sided", mw.p}, {"exact", mw.exact}};
  } catch (const rlorf::StatsError& e) {
    out["mann_whitney"] = {{"error", e.what()}};
  }
  std::cout << out.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app("Q-learning with online random forests");
  app.require_subcommand(1);

  auto* run = app.add_subcommand("run", "execute an experiment");
  rlorf::cli::RunOptions run_options;
  rlorf::cli::register_run_options(*run, run_options);

  auto* agg = app.add_subcommand("aggregate", "recompute summary.json from runs.csv");
  std::filesystem::path runs_path;
  std::filesystem::path agg_output = ".";
  bool agg_no_curve = false;
  agg->add_option("--runs", runs_path, "runs.csv to read")->required();
  agg->add_option("--output", agg_output, "directory for summary.json and curve.csv")->capture_default_str();
  agg->add_flag("--no-curve", agg_no_curve, "skip curve.csv");

  auto* cmp = app.add_subcommand("compare", "test statistics for two summary files");
  std::filesystem::path summary_a;
  std::filesystem::path summary_b;
  cmp->add_option("a", summary_a, "summary.json of sample a")->required();
  cmp->add_option("b", summary_b, "summary.json of sample b")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kConfigError;
  }

  try {
    if (run->parsed()) return do_run(rlorf::cli::resolve(run_options));
    if (agg->parsed()) return do_aggregate(runs_path, agg_output, !agg_no_curve);
    if (cmp->parsed()) return do_compare(summary_a, summary_b);
  } catch (const rlorf::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kRuntimeError;
  }
  return kConfigError;
}
