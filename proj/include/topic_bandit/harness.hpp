#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "topic_bandit/evaluation.hpp"
#include "topic_bandit/external_world.hpp"
#include "topic_bandit/replay_world.hpp"
#include "topic_bandit/strategies.hpp"
#include "topic_bandit/synthetic_world.hpp"

namespace topic_bandit::harness {

// ------------------------------------------------------------- exit codes

enum ExitCode : int { kExitOk = 0, kExitFailure = 1, kExitConfig = 2, kExitWorld = 3, kExitArtifact = 4 };

/// Stable mapping from error type to process exit code.
int exit_code_for(const std::exception& error);

/// Sets the default logger level from TOPIC_BANDIT_LOG (trace, debug, info,
/// warn, error, off). Defaults to warn.
void configure_logging();

// ------------------------------------------------------------- config

/// Parsed JSON plus the source line of every object key and array element,
/// keyed by JSON pointer.
struct ConfigDocument {
  nlohmann::json root;
  std::map<std::string, int> lines;

  /// Line of the pointer or of its nearest located ancestor.
  int line_of(const std::string& pointer) const;
};

/// Syntax errors become ConfigError("line N: ...").
ConfigDocument parse_config_document(std::string_view text);

struct WorldSpec {
  WorldKind kind = WorldKind::synthetic;
  SyntheticWorldConfig synthetic;
  /// Defaults to a stream derived from the master seed.
  std::optional<std::uint64_t> seed;
  std::filesystem::path path;
  /// Lets replay runs use a cap above the smallest per-topic record count.
  bool allow_cap_above_records = false;
  AdapterConfig adapter;
  std::vector<std::string> topic_names;
  int line = 0;
};

struct CostSpec {
  CostSheet sheet = calibrated_cost_sheet();
  std::vector<std::int64_t> requests{20'000, 200'000, 2'000'000};
};

struct ScalingConfig {
  ScalingSpec spec;
  std::optional<std::uint64_t> seed;
};

struct RankUtilityConfig {
  std::filesystem::path dataset;
  std::vector<SubsetStrategy> strategies{SubsetStrategy::random, SubsetStrategy::difficult};
  RankUtilitySpec spec;
  std::optional<std::uint64_t> seed;
};

struct CrossRankConfig {
  std::filesystem::path dataset;
  /// Empty selects every dimension in the dataset.
  std::vector<std::string> dimensions;
  int k = 10;
};

struct GenWorldConfig {
  std::filesystem::path path;
  ReplayGenConfig gen;
  std::optional<std::uint64_t> seed;
};

struct ExperimentConfig {
  std::optional<WorldSpec> world;
  std::vector<StrategyConfig> strategies;
  /// Config line of each strategy, for later validation messages.
  std::vector<int> strategy_lines;
  std::int64_t budget = 0;
  std::int64_t checkpoint_every = 0;
  std::vector<int> ks{10};
  /// Seed indices. Each run's stream is derived from (master_seed, strategy, index).
  std::vector<std::uint64_t> seeds;
  std::uint64_t master_seed = 0;
  std::size_t workers = 1;
  std::filesystem::path output = "results";
  std::optional<CostSpec> cost;
  std::optional<ScalingConfig> scaling;
  std::optional<RankUtilityConfig> rank_utility;
  std::optional<CrossRankConfig> cross_rank;
  std::optional<GenWorldConfig> gen_world;
};

/// Relative paths inside the document resolve against `base_dir`.
ExperimentConfig parse_experiment_config(std::string_view text, const std::filesystem::path& base_dir = ".");
ExperimentConfig load_experiment_config(const std::filesystem::path& path);

std::unique_ptr<World> build_world(const WorldSpec& spec, std::uint64_t master_seed);

// ------------------------------------------------------------- commands

struct AggregatePoint {
  std::string strategy;
  int k = 0;
  std::int64_t step = 0;
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t n_seeds = 0;
};

/// Mean and sample std-dev of achieved difficulty per (strategy, k, step),
/// over the steps present in every run of the group.
std::vector<AggregatePoint> aggregate_trajectories(const std::vector<RunResult>& runs);

/// Seed of run `seed_index` for a strategy label.
std::uint64_t run_seed(std::uint64_t master_seed, const std::string& strategy, std::uint64_t seed_index);

/// Every (strategy, seed) cell to the shared budget. Writes runs/, pull logs,
/// trajectories.csv, aggregate.csv, oracle.csv, world.json and manifest.json.
std::vector<RunResult> run_matrix(const ExperimentConfig& config, const std::filesystem::path& out,
                                  std::ostream& log);

void cmd_gen_world(const ExperimentConfig& config, const std::filesystem::path& out, std::ostream& log);
/// Returns false when `assert_monotone` is set and the curve decreases by
/// more than twice the combined CI half widths.
bool cmd_scaling(const ExperimentConfig& config, const std::filesystem::path& out, std::ostream& log,
                 bool assert_monotone = false);
void cmd_cost(const ExperimentConfig& config, const std::filesystem::path& out, std::ostream& log);
void cmd_rank_utility(const ExperimentConfig& config, const std::filesystem::path& out, std::ostream& log);
void cmd_cross_rank(const ExperimentConfig& config, const std::filesystem::path& out, std::ostream& log);

/// Recomputes every run's selection and achieved difficulty from its pull
/// log, prints one line per (strategy, k) plus the oracle, and writes
/// report_summary.csv and report_long.csv. Throws ArtifactError on missing
/// or inconsistent artifacts.
void cmd_report(const std::filesystem::path& dir, std::ostream& log);

}  // namespace topic_bandit::harness
