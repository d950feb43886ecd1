#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "topic_bandit/core.hpp"
#include "topic_bandit/gmm.hpp"
#include "topic_bandit/replay_world.hpp"
#include "topic_bandit/strategies.hpp"
#include "topic_bandit/world.hpp"

namespace topic_bandit {

// ------------------------------------------------------------- oracle

struct OracleSelection {
  std::vector<TopicId> ids;
  double value = 0.0;
};

/// The k largest true means (ties by lower id) and their average.
OracleSelection oracle_topk(const World& world, int k);
OracleSelection oracle_topk(std::span<const double> true_means, int k);

/// Average true mean of the selected topics.
double achieved_difficulty(std::span<const TopicId> selected, const World& world);
double achieved_difficulty(std::span<const TopicId> selected, std::span<const double> true_means);

/// Oracle value minus achieved difficulty for k = |selected|. Never negative.
double regret(std::span<const TopicId> selected, const World& world);
double regret(std::span<const TopicId> selected, std::span<const double> true_means);

// ------------------------------------------------------------- scaling

struct ScalingPoint {
  std::size_t n_topics = 0;
  double expected_topk = 0.0;
  /// 95% normal-approximation half width.
  double ci_halfwidth = 0.0;
  std::size_t reps = 0;
};

struct ScalingCurve {
  int k = 1;
  std::vector<ScalingPoint> points;
};

struct ScalingSpec {
  GmmParams gmm = default_gmm();
  std::vector<std::size_t> sizes;
  int k = 10;
  /// Repetitions per size. 0 picks 100 up to 1e5 topics and 20 above.
  std::size_t reps = 0;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

/// Mean oracle top-k of true topic means across independent synthetic worlds.
ScalingCurve scaling_study(const ScalingSpec& spec);

// ------------------------------------------------------------- cost

struct TokenBreakdown {
  double tokens_in = 0.0;
  double tokens_out = 0.0;
  double price_in_per_m = 0.0;
  double price_out_per_m = 0.0;
  double grounded_fee_per_request = 0.0;

  double per_request() const;
};

struct CostComponent {
  double per_request = 0.0;
  std::optional<TokenBreakdown> tokens;
};

struct CostSheet {
  CostComponent search;
  CostComponent translation;
  CostComponent qe;

  /// Non-negative costs; token breakdowns agree with per-request figures (1e-9).
  void validate() const;
};

/// Per-request components calibrated to the published 20k-request row
/// ($87 search, $2 translation, $15 QE).
CostSheet calibrated_cost_sheet();

struct CostEstimate {
  double search = 0.0;
  double translation = 0.0;
  double qe = 0.0;
  double total = 0.0;
};

CostEstimate cost_estimate(std::int64_t n_requests, const CostSheet& sheet);

struct SearchCostInputs {
  double tokens_in = 146.0;
  double tokens_out = 94.0;
  /// Dollars per million tokens.
  double price_in = 1.25;
  double price_out = 10.0;
  /// Dollars per grounded request.
  double grounded_fee = 0.035;
  double queries_per_topic = 3.0;
  double samples_per_topic = 25.0;
};

/// Search cost attributable to one sample: several grounded queries per
/// topic spread over the samples collected for it.
double derive_search_request_cost(const SearchCostInputs& in = {});

// ------------------------------------------------------------- rank utility

enum class SubsetStrategy { random, difficult, high_variance };

const char* to_string(SubsetStrategy s);
SubsetStrategy parse_subset_strategy(std::string_view text);

struct RankUtilitySpec {
  SubsetStrategy strategy = SubsetStrategy::random;
  std::vector<std::size_t> sizes;
  std::size_t reps = 10;
  std::uint64_t seed = 0;
  std::size_t permutations = 10'000;
  double alpha = 0.05;
  /// Search used to find difficult topics for SubsetStrategy::difficult.
  StrategyConfig search{"", StrategyKind::epsilon_greedy, Cap{25}, 0.7};
  /// Pull budget for that search. 0 uses twice the topic count.
  std::int64_t search_budget = 0;
};

struct RankUtilityRow {
  std::size_t size = 0;
  /// Fraction of adjacent model pairs separated at p < alpha.
  double power = 0.0;
  double avg_difficulty = 0.0;
  double avg_adjacent_gap = 0.0;
  /// Kendall tau-b of the subset model ranking against the full-set ranking.
  double rank_similarity = 0.0;
};

struct RankUtilityReport {
  SubsetStrategy strategy = SubsetStrategy::random;
  std::vector<std::string> models;
  std::vector<RankUtilityRow> rows;
};

/// Per-sample score of each model: mean QE over the dimensions naming that
/// model ("<language>/<model>", or the whole name when it has no slash).
struct ModelScores {
  std::vector<std::string> models;
  /// scores[m][record]
  std::vector<std::vector<double>> scores;
};

ModelScores model_scores(const ReplayWorld& dataset);

/// Two-sided paired sign-flip permutation test on mean difference.
/// p = (1 + #{|perm| >= |observed|}) / (1 + permutations).
double paired_permutation_pvalue(std::span<const double> a, std::span<const double> b, std::size_t permutations,
                                 Rng& rng);

/// Kendall tau-b; 1 for identical orderings.
double kendall_tau(std::span<const double> x, std::span<const double> y);

RankUtilityReport rank_utility(const ReplayWorld& dataset, const RankUtilitySpec& spec);

// ------------------------------------------------------------- cross rank

/// Average 1-based rank, in `dim_b`'s topic ranking by difficulty, of the
/// top-k topics under `dim_a`.
double cross_rank(const ReplayWorld& dataset, const std::string& dim_a, const std::string& dim_b, int k);

/// Per-topic difficulty along one QE dimension: 100 - mean score.
std::vector<double> dimension_difficulty(const ReplayWorld& dataset, const std::string& dim);

}  // namespace topic_bandit
