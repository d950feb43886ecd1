#include <algorithm>

#include "selection.hpp"
#include "topic_bandit/strategies.hpp"

namespace topic_bandit {

using detail::Ranked;
using detail::RankedOrder;

namespace {

std::vector<TopicId> all_topics(std::size_t n) {
  std::vector<TopicId> v(n);
  for (std::size_t i = 0; i < n; ++i) v[i] = static_cast<TopicId>(i);
  return v;
}

std::vector<TopicId> unsampled_in(const Ledger& ledger, std::span<const TopicId> domain) {
  std::vector<TopicId> out;
  for (TopicId t : domain) {
    if (ledger.count(t) == 0 && !ledger.retired(t)) out.push_back(t);
  }
  return out;
}

std::vector<Ranked> exploit_ranking(const Ledger& ledger, Cap cap, std::span<const TopicId> domain) {
  std::vector<Ranked> out;
  for (TopicId t : domain) {
    if (ledger.count(t) > 0 && ledger.eligible(t, cap)) out.push_back({*ledger.mean(t), t});
  }
  std::sort(out.begin(), out.end(), RankedOrder{});
  return out;
}

std::vector<TopicId> greedy_batch(const Ledger& ledger, Cap cap, std::span<const TopicId> domain, std::size_t b,
                                  Rng& rng) {
  std::vector<TopicId> out;
  auto unsampled = unsampled_in(ledger, domain);
  detail::pick_uniform(unsampled, std::min(b, unsampled.size()), rng, out);
  if (out.size() < b) {
    const auto ranking = exploit_ranking(ledger, cap, domain);
    detail::take_top(ranking.begin(), ranking.end(), b - out.size(), {}, rng, out);
  }
  return out;
}

std::vector<TopicId> epsilon_batch(const Ledger& ledger, Cap cap, double epsilon, std::size_t b, Rng& rng) {
  const auto domain = all_topics(ledger.size());
  std::vector<TopicId> out;
  auto unsampled = unsampled_in(ledger, domain);
  std::size_t exploit_slots = 0;
  for (std::size_t slot = 0; slot < b; ++slot) {
    if (!unsampled.empty() && detail::flip(epsilon, rng)) {
      detail::pick_uniform(unsampled, 1, rng, out);
    } else {
      ++exploit_slots;
    }
  }
  if (exploit_slots > 0) {
    const auto ranking = exploit_ranking(ledger, cap, domain);
    const auto taken = detail::take_top(ranking.begin(), ranking.end(), exploit_slots, {}, rng, out);
    // Nothing exploitable yet: explore instead.
    detail::pick_uniform(unsampled, std::min(exploit_slots - taken, unsampled.size()), rng, out);
  }
  return out;
}

std::vector<TopicId> brute_batch(const Ledger& ledger, Cap cap, std::size_t b, Rng& rng) {
  std::vector<TopicId> pool;
  for (TopicId t = 0; t < ledger.size(); ++t) {
    if (ledger.eligible(t, cap)) pool.push_back(t);
  }
  std::vector<TopicId> out;
  detail::pick_uniform(pool, std::min(b, pool.size()), rng, out);
  return out;
}

std::vector<TopicId> contextual_batch(const Ledger& ledger, Cap cap, const SimilarityIndex& index,
                                      double temperature, std::size_t b, Rng& rng) {
  std::vector<Ranked> ranking;
  bool unscoreable = false;
  for (TopicId t = 0; t < ledger.size(); ++t) {
    const auto s = contextual_score(t, ledger, index, temperature);
    if (!s) {
      unscoreable = true;
      continue;
    }
    if (ledger.eligible(t, cap)) ranking.push_back({*s, t});
  }
  std::sort(ranking.begin(), ranking.end(), RankedOrder{});

  std::vector<TopicId> out;
  if (unscoreable) {
    auto unsampled = unsampled_in(ledger, all_topics(ledger.size()));
    detail::pick_uniform(unsampled, std::min(b, unsampled.size()), rng, out);
  }
  if (out.size() < b) {
    const std::vector<TopicId> chosen = out;
    detail::take_top(ranking.begin(), ranking.end(), b - out.size(), chosen, rng, out);
  }
  return out;
}

std::optional<TopicId> single(std::vector<TopicId> batch) {
  if (batch.empty()) return std::nullopt;
  return batch.front();
}

}  // namespace

std::optional<TopicId> brute_choose(const Ledger& ledger, Cap cap, Rng& rng) {
  return single(brute_batch(ledger, cap, 1, rng));
}

std::optional<TopicId> greedy_choose(const Ledger& ledger, Cap cap, Rng& rng) {
  return single(greedy_batch(ledger, cap, all_topics(ledger.size()), 1, rng));
}

std::optional<TopicId> epsilon_greedy_choose(const Ledger& ledger, Cap cap, double epsilon, Rng& rng) {
  return single(epsilon_batch(ledger, cap, epsilon, 1, rng));
}

std::optional<TopicId> subset_greedy_choose(const Ledger& ledger, Cap cap, std::span<const TopicId> subset,
                                            Rng& rng) {
  return single(greedy_batch(ledger, cap, subset, 1, rng));
}

std::optional<TopicId> contextual_choose(const Ledger& ledger, Cap cap, const SimilarityIndex& index,
                                         double temperature, Rng& rng) {
  return single(contextual_batch(ledger, cap, index, temperature, 1, rng));
}

std::vector<TopicId> batch_choose(const StrategyConfig& config, const Ledger& ledger, std::size_t b, Rng& rng,
                                  const SimilarityIndex* index, std::span<const TopicId> subset) {
  if (b < 1) throw ConfigError("batch size must be >= 1");
  switch (config.kind) {
    case StrategyKind::brute:
      return brute_batch(ledger, config.cap, b, rng);
    case StrategyKind::greedy:
      return greedy_batch(ledger, config.cap, all_topics(ledger.size()), b, rng);
    case StrategyKind::epsilon_greedy:
      return epsilon_batch(ledger, config.cap, config.epsilon, b, rng);
    case StrategyKind::subset_greedy:
      if (subset.empty()) throw ConfigError("subset_greedy needs a subset");
      return greedy_batch(ledger, config.cap, subset, b, rng);
    case StrategyKind::contextual:
      if (index == nullptr) throw ConfigError("contextual strategy needs a similarity index");
      return contextual_batch(ledger, config.cap, *index, config.temperature, b, rng);
  }
  return {};
}

}  // namespace topic_bandit
