#include "topic_bandit/bandit.hpp"

#include <algorithm>
#include <string>

#include "../strategies/selection.hpp"

namespace topic_bandit {

std::vector<TopicId> select_topk(const Ledger& ledger, int k, Rng& rng) {
  if (k < 1) throw ConfigError("k must be >= 1");
  std::vector<detail::Ranked> scored;
  scored.reserve(ledger.sampled_topics());
  for (TopicId t = 0; t < ledger.size(); ++t) {
    if (ledger.count(t) > 0) scored.push_back({*ledger.mean(t), t});
  }
  const auto want = static_cast<std::size_t>(k);
  if (scored.size() < want) {
    throw InsufficientDataError("only " + std::to_string(scored.size()) + " topics sampled, need " +
                                std::to_string(k));
  }
  // Keep everything tied with the k-th best so the cut sees the whole group.
  const auto kth = scored.begin() + static_cast<std::ptrdiff_t>(want - 1);
  std::nth_element(scored.begin(), kth, scored.end(), detail::RankedOrder{});
  const double threshold = kth->score;
  std::vector<detail::Ranked> head;
  for (const auto& r : scored) {
    if (r.score >= threshold) head.push_back(r);
  }
  std::sort(head.begin(), head.end(), detail::RankedOrder{});
  std::vector<TopicId> out;
  detail::take_top(head.begin(), head.end(), want, {}, rng, out);
  return out;
}

std::vector<RunResult> run_bandit_multi(const World& world, const StrategyConfig& strategy, std::int64_t budget,
                                        std::span<const int> ks, std::int64_t checkpoint_every, std::uint64_t seed,
                                        const RunOptions& options) {
  const std::size_t n = world.size();
  strategy.validate(n);
  if (ks.empty()) throw ConfigError("at least one k is required");
  for (int k : ks) BudgetConfig{budget, k, checkpoint_every}.validate(n);
  const std::int64_t spacing = BudgetConfig{budget, 1, checkpoint_every}.checkpoint_spacing();

  Rng decide(derive_seed(seed, "decide"));
  Rng draws(derive_seed(seed, "draw"));
  Rng subset_rng(derive_seed(seed, "subset"));

  std::vector<TopicId> subset;
  if (strategy.kind == StrategyKind::subset_greedy) subset = choose_subset(n, strategy.rho, subset_rng);

  std::optional<SimilarityIndex> local_index;
  const SimilarityIndex* index = options.index;
  if (strategy.kind == StrategyKind::contextual && index == nullptr) {
    local_index.emplace(world.topics());
    index = &*local_index;
  }

  Ledger ledger(n);
  auto chooser = make_chooser(strategy, ledger, index, subset);
  auto session = world.open_session();
  const auto true_means = world.true_means();

  std::vector<RunResult> results(ks.size());
  std::vector<Rng> checkpoint_rngs;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    results[i].strategy = strategy.label();
    results[i].k = ks[i];
    results[i].seed = seed;
    checkpoint_rngs.emplace_back(derive_seed(seed, "checkpoint", static_cast<std::uint64_t>(ks[i])));
  }

  const auto checkpoint = [&] {
    if (!true_means) return;
    for (std::size_t i = 0; i < ks.size(); ++i) {
      auto& traj = results[i].trajectory;
      if (!traj.empty() && traj.back().step == ledger.total_pulls()) continue;
      if (ledger.sampled_topics() < static_cast<std::size_t>(ks[i])) continue;
      double achieved = 0.0;
      for (TopicId t : select_topk(ledger, ks[i], checkpoint_rngs[i])) achieved += (*true_means)[t];
      traj.push_back({ledger.total_pulls(), achieved / ks[i]});
    }
  };

  std::vector<Observation> log;
  log.reserve(static_cast<std::size_t>(std::min<std::int64_t>(budget, 1 << 24)));
  std::vector<TopicId> exhausted;
  std::int64_t failed = 0;
  std::int64_t consecutive_failures = 0;
  bool unspent = false;

  while (ledger.total_pulls() < budget) {
    const auto room = static_cast<std::size_t>(budget - ledger.total_pulls());
    const auto picks = chooser->choose(ledger, std::min(strategy.batch, room), decide);
    if (picks.empty()) {
      unspent = true;
      break;
    }
    const auto outcomes = session->draw_batch(picks, draws);
    for (std::size_t i = 0; i < picks.size(); ++i) {
      const auto& o = outcomes[i];
      switch (o.status) {
        case DrawStatus::ok: {
          const Observation obs{picks[i], o.difficulty, ledger.total_pulls() + 1};
          ledger.record(obs);
          chooser->observe(ledger, obs.topic_id);
          log.push_back(obs);
          consecutive_failures = 0;
          if (obs.step % spacing == 0) checkpoint();
          break;
        }
        case DrawStatus::exhausted:
          ledger.retire(picks[i]);
          chooser->observe(ledger, picks[i]);
          exhausted.push_back(picks[i]);
          break;
        case DrawStatus::failed:
          ++failed;
          ++consecutive_failures;
          break;
      }
    }
    if (consecutive_failures >= options.max_consecutive_failures) {
      unspent = true;
      break;
    }
  }
  checkpoint();

  for (std::size_t i = 0; i < ks.size(); ++i) {
    auto& r = results[i];
    Rng final_rng(derive_seed(seed, "select", static_cast<std::uint64_t>(ks[i])));
    r.selected = select_topk(ledger, ks[i], final_rng);
    for (TopicId t : r.selected) r.empirical_means.push_back(*ledger.mean(t));
    r.total_pulls = ledger.total_pulls();
    r.budget_unspent = unspent;
    r.failed_draws = failed;
    r.exhausted_topics = exhausted;
    r.pull_log = log;
  }
  return results;
}

RunResult run_bandit(const World& world, const StrategyConfig& strategy, const BudgetConfig& budget,
                     std::uint64_t seed, const RunOptions& options) {
  const int ks[1] = {budget.k};
  return std::move(run_bandit_multi(world, strategy, budget.budget, ks, budget.checkpoint_every, seed, options).front());
}

}  // namespace topic_bandit
