#include <algorithm>
#include <bit>
#include <set>

#include "selection.hpp"
#include "topic_bandit/strategies.hpp"

namespace topic_bandit {

using detail::Ranked;
using detail::RankedOrder;

namespace {

/// Membership over [0, n) with O(log n) rank selection (Fenwick tree).
class IndexSet {
 public:
  explicit IndexSet(std::size_t n) : tree_(n + 1, 0), member_(n, 0) {}

  bool contains(TopicId t) const { return member_[t] != 0; }
  std::size_t size() const { return size_; }

  void insert(TopicId t) {
    if (member_[t]) return;
    member_[t] = 1;
    ++size_;
    add(t, 1);
  }

  void erase(TopicId t) {
    if (!member_[t]) return;
    member_[t] = 0;
    --size_;
    add(t, -1);
  }

  /// The r-th smallest member, 0-based.
  TopicId nth(std::size_t r) const {
    std::size_t pos = 0;
    auto remaining = static_cast<std::int64_t>(r);
    for (std::size_t step = std::bit_floor(tree_.size() - 1); step > 0; step >>= 1) {
      const std::size_t next = pos + step;
      if (next < tree_.size() && tree_[next] <= remaining) {
        pos = next;
        remaining -= tree_[next];
      }
    }
    return static_cast<TopicId>(pos);
  }

  /// Same draws as detail::pick_uniform over the ascending member list.
  void pick_uniform(std::size_t m, Rng& rng, std::vector<TopicId>& out) {
    const std::size_t start = out.size();
    for (std::size_t i = 0; i < m && size_ > 0; ++i) {
      const TopicId t = nth(rng.uniform_index(size_));
      out.push_back(t);
      erase(t);
    }
    for (std::size_t i = start; i < out.size(); ++i) insert(out[i]);
  }

 private:
  void add(TopicId t, std::int64_t delta) {
    for (std::size_t i = t + 1; i < tree_.size(); i += i & (~i + 1)) tree_[i] += delta;
  }

  std::vector<std::int64_t> tree_;
  std::vector<char> member_;
  std::size_t size_ = 0;
};

/// Topics keyed by score in RankedOrder.
class RankedSet {
 public:
  explicit RankedSet(std::size_t n) : keys_(n) {}

  void assign(TopicId t, std::optional<double> score) {
    auto& key = keys_[t];
    if (key && score && *key == *score) return;
    if (key) set_.erase(Ranked{*key, t});
    key = score;
    if (key) set_.insert(Ranked{*key, t});
  }

  std::size_t take_top(std::size_t m, std::span<const TopicId> excluded, Rng& rng, std::vector<TopicId>& out) const {
    return detail::take_top(set_.begin(), set_.end(), m, excluded, rng, out);
  }

 private:
  std::vector<std::optional<double>> keys_;
  std::set<Ranked, RankedOrder> set_;
};

std::vector<char> domain_mask(std::size_t n, std::span<const TopicId> subset) {
  std::vector<char> mask(n, subset.empty() ? 1 : 0);
  for (TopicId t : subset) mask.at(t) = 1;
  return mask;
}

class BruteChooser final : public Chooser {
 public:
  BruteChooser(Cap cap, const Ledger& ledger) : cap_(cap), eligible_(ledger.size()) {
    for (TopicId t = 0; t < ledger.size(); ++t) observe(ledger, t);
  }

  std::vector<TopicId> choose(const Ledger&, std::size_t b, Rng& rng) override {
    std::vector<TopicId> out;
    eligible_.pick_uniform(std::min(b, eligible_.size()), rng, out);
    return out;
  }

  void observe(const Ledger& ledger, TopicId t) override {
    if (ledger.eligible(t, cap_)) {
      eligible_.insert(t);
    } else {
      eligible_.erase(t);
    }
  }

 private:
  Cap cap_;
  IndexSet eligible_;
};

/// Unsampled pool plus empirical-mean ranking, restricted to a domain.
class GreedyChooser : public Chooser {
 public:
  GreedyChooser(Cap cap, const Ledger& ledger, std::span<const TopicId> subset)
      : cap_(cap), in_domain_(domain_mask(ledger.size(), subset)), unsampled_(ledger.size()), ranking_(ledger.size()) {
    for (TopicId t = 0; t < ledger.size(); ++t) observe(ledger, t);
  }

  std::vector<TopicId> choose(const Ledger&, std::size_t b, Rng& rng) override {
    std::vector<TopicId> out;
    unsampled_.pick_uniform(std::min(b, unsampled_.size()), rng, out);
    if (out.size() < b) ranking_.take_top(b - out.size(), {}, rng, out);
    return out;
  }

  void observe(const Ledger& ledger, TopicId t) override {
    if (!in_domain_[t]) return;
    if (ledger.count(t) == 0 && !ledger.retired(t)) {
      unsampled_.insert(t);
    } else {
      unsampled_.erase(t);
    }
    std::optional<double> key;
    if (ledger.count(t) > 0 && ledger.eligible(t, cap_)) key = ledger.mean(t);
    ranking_.assign(t, key);
  }

 protected:
  Cap cap_;
  std::vector<char> in_domain_;
  IndexSet unsampled_;
  RankedSet ranking_;
};

class EpsilonGreedyChooser final : public GreedyChooser {
 public:
  EpsilonGreedyChooser(Cap cap, double epsilon, const Ledger& ledger)
      : GreedyChooser(cap, ledger, {}), epsilon_(epsilon) {}

  std::vector<TopicId> choose(const Ledger&, std::size_t b, Rng& rng) override {
    std::vector<TopicId> out;
    std::vector<TopicId> held;
    const auto explore_one = [&] {
      const TopicId t = unsampled_.nth(rng.uniform_index(unsampled_.size()));
      out.push_back(t);
      held.push_back(t);
      unsampled_.erase(t);
    };
    std::size_t exploit_slots = 0;
    for (std::size_t slot = 0; slot < b; ++slot) {
      if (unsampled_.size() > 0 && detail::flip(epsilon_, rng)) {
        explore_one();
      } else {
        ++exploit_slots;
      }
    }
    if (exploit_slots > 0) {
      const auto taken = ranking_.take_top(exploit_slots, {}, rng, out);
      // Nothing exploitable yet: explore instead.
      for (std::size_t i = taken; i < exploit_slots && unsampled_.size() > 0; ++i) explore_one();
    }
    for (TopicId t : held) unsampled_.insert(t);
    return out;
  }

 private:
  double epsilon_;
};

class ContextualChooser final : public Chooser {
 public:
  ContextualChooser(Cap cap, double temperature, const SimilarityIndex& index, const Ledger& ledger)
      : cap_(cap),
        temperature_(temperature),
        index_(index),
        scoreable_(ledger.size(), 1),
        unsampled_(ledger.size()),
        ranking_(ledger.size()) {
    if (index.size() != ledger.size()) throw ConfigError("similarity index size does not match topic count");
    for (TopicId t = 0; t < ledger.size(); ++t) refresh(ledger, t);
  }

  std::vector<TopicId> choose(const Ledger&, std::size_t b, Rng& rng) override {
    std::vector<TopicId> out;
    if (unscoreable_ > 0) unsampled_.pick_uniform(std::min(b, unsampled_.size()), rng, out);
    if (out.size() < b) {
      const std::vector<TopicId> chosen = out;
      ranking_.take_top(b - out.size(), chosen, rng, out);
    }
    return out;
  }

  void observe(const Ledger& ledger, TopicId t) override {
    refresh(ledger, t);
    for (const auto& n : index_.neighbors(t)) refresh(ledger, n.id);
  }

 private:
  void refresh(const Ledger& ledger, TopicId t) {
    if (ledger.count(t) == 0 && !ledger.retired(t)) {
      unsampled_.insert(t);
    } else {
      unsampled_.erase(t);
    }
    const auto score = contextual_score(t, ledger, index_, temperature_);
    const char now = score ? 1 : 0;
    if (now != scoreable_[t]) {
      unscoreable_ += now ? -1 : 1;
      scoreable_[t] = now;
    }
    ranking_.assign(t, score && ledger.eligible(t, cap_) ? score : std::nullopt);
  }

  Cap cap_;
  double temperature_;
  const SimilarityIndex& index_;
  std::vector<char> scoreable_;
  std::int64_t unscoreable_ = 0;
  IndexSet unsampled_;
  RankedSet ranking_;
};

}  // namespace

std::unique_ptr<Chooser> make_chooser(const StrategyConfig& config, const Ledger& ledger,
                                      const SimilarityIndex* index, std::span<const TopicId> subset) {
  switch (config.kind) {
    case StrategyKind::brute:
      return std::make_unique<BruteChooser>(config.cap, ledger);
    case StrategyKind::greedy:
      return std::make_unique<GreedyChooser>(config.cap, ledger, std::span<const TopicId>{});
    case StrategyKind::epsilon_greedy:
      return std::make_unique<EpsilonGreedyChooser>(config.cap, config.epsilon, ledger);
    case StrategyKind::subset_greedy:
      if (subset.empty()) throw ConfigError("subset_greedy needs a subset");
      return std::make_unique<GreedyChooser>(config.cap, ledger, subset);
    case StrategyKind::contextual:
      if (index == nullptr) throw ConfigError("contextual strategy needs a similarity index");
      return std::make_unique<ContextualChooser>(config.cap, config.temperature, *index, ledger);
  }
  throw ConfigError("unknown strategy kind");
}

}  // namespace topic_bandit
