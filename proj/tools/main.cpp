#include <iostream>

#include <CLI11.hpp>
#include "topic_bandit/harness.hpp"

namespace th = topic_bandit::harness;

int main(int argc, char** argv) {
  th::configure_logging();

  CLI::App app{"Budget-constrained search for the most difficult topics."};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> workers;
  app.add_option("--config", config_path, "Experiment config (JSON)");
  app.add_option("--out", out_dir, "Output directory (overrides the config)");
  app.add_option("--seed", seed, "Master seed (overrides the config)");
  app.add_option("--workers", workers, "Concurrent runs (overrides the config)")->check(CLI::PositiveNumber);

  auto* gen = app.add_subcommand("gen-world", "Write a synthetic pre-scored replay dataset");
  auto* simulate = app.add_subcommand("simulate", "Run every strategy x seed to the budget");
  auto* scaling = app.add_subcommand("scaling", "Expected oracle top-k versus topic-set size");
  bool assert_monotone = false;
  scaling->add_flag("--assert-monotone", assert_monotone, "Exit 1 if the curve decreases beyond its CIs");
  auto* cost = app.add_subcommand("cost", "Dollar cost table");
  std::vector<std::int64_t> requests;
  cost->add_option("--requests", requests, "Request counts (overrides the config)");
  auto* rank = app.add_subcommand("rank-utility", "Ranking utility of difficult subsets");
  auto* cross = app.add_subcommand("cross-rank", "Cross-dimension rank overlap of difficult topics");
  auto* report = app.add_subcommand("report", "Summarise a simulate output directory");
  std::string report_dir;
  report->add_option("dir", report_dir, "Run directory (defaults to --out)");

  CLI11_PARSE(app, argc, argv);

  try {
    th::ExperimentConfig config;
    if (!config_path.empty()) {
      config = th::load_experiment_config(config_path);
    } else if (simulate->parsed() || scaling->parsed() || rank->parsed()) {
      throw topic_bandit::ConfigError("line 0: --config is required for this subcommand");
    }
    if (seed) config.master_seed = *seed;
    if (workers) config.workers = *workers;
    if (!out_dir.empty()) config.output = out_dir;
    if (!requests.empty()) {
      if (!config.cost) config.cost.emplace();
      config.cost->requests = requests;
    }

    if (gen->parsed()) th::cmd_gen_world(config, config.output, std::cout);
    if (simulate->parsed()) th::run_matrix(config, config.output, std::cout);
    if (scaling->parsed() && !th::cmd_scaling(config, config.output, std::cout, assert_monotone)) {
      return th::kExitFailure;
    }
    if (cost->parsed()) th::cmd_cost(config, config.output, std::cout);
    if (rank->parsed()) th::cmd_rank_utility(config, config.output, std::cout);
    if (cross->parsed()) th::cmd_cross_rank(config, config.output, std::cout);
    if (report->parsed()) th::cmd_report(report_dir.empty() ? config.output : std::filesystem::path(report_dir), std::cout);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return th::exit_code_for(e);
  }
  return th::kExitOk;
}
