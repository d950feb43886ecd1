#pragma once

#include <span>
#include <vector>

#include "topic_bandit/core.hpp"
#include "topic_bandit/strategies.hpp"
#include "topic_bandit/world.hpp"

namespace topic_bandit {

/// The k sampled topics with the highest empirical means, best first. Ties
/// are broken uniformly with `rng`. Throws InsufficientDataError when fewer
/// than k topics have observations.
std::vector<TopicId> select_topk(const Ledger& ledger, int k, Rng& rng);

struct RunOptions {
  /// Consecutive failed draws (adapter errors) tolerated before the run
  /// stops early with `budget_unspent` set.
  std::int64_t max_consecutive_failures = 64;
  /// Similarity index for contextual strategies; built from the world's
  /// keywords when null.
  const SimilarityIndex* index = nullptr;
};

/// Drives a strategy against a world until the budget is spent or no topic is
/// eligible, then selects the top-k. Decisions, draws, subset choice and
/// tie-breaking use separate streams derived from `seed`.
RunResult run_bandit(const World& world, const StrategyConfig& strategy, const BudgetConfig& budget,
                     std::uint64_t seed, const RunOptions& options = {});

/// One run evaluated at several selection sizes. The pull sequence does not
/// depend on k, so every result shares the same pull log.
std::vector<RunResult> run_bandit_multi(const World& world, const StrategyConfig& strategy, std::int64_t budget,
                                        std::span<const int> ks, std::int64_t checkpoint_every, std::uint64_t seed,
                                        const RunOptions& options = {});

}  // namespace topic_bandit
