#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "topic_bandit/core.hpp"
#include "topic_bandit/rng.hpp"

namespace topic_bandit {

enum class StrategyKind { brute, greedy, epsilon_greedy, subset_greedy, contextual };

const char* to_string(StrategyKind kind);
StrategyKind parse_strategy_kind(std::string_view text);

struct StrategyConfig {
  /// Label used in output files and seed derivation. Defaults to the kind.
  std::string name;
  StrategyKind kind = StrategyKind::greedy;
  Cap cap{25};
  /// Exploration probability (epsilon_greedy).
  double epsilon = 0.7;
  /// Fraction of topics in the frozen subset (subset_greedy).
  double rho = 0.1;
  /// Topics pulled per round.
  std::size_t batch = 1;
  /// Softmax temperature over neighbour similarities (contextual).
  double temperature = 1.0;

  std::string label() const { return name.empty() ? to_string(kind) : name; }
  void validate(std::size_t n_topics) const;
};

// ---------------------------------------------------------------- keywords

/// Lowercases and splits on runs of non-alphanumeric characters. Sorted, unique.
std::vector<std::string> keywords_from_name(std::string_view name);
/// Lowercases, sorts and dedups an existing keyword list.
std::vector<std::string> normalize_keywords(std::vector<std::string> keywords);

/// |a ∩ b| / |a ∪ b| over sorted unique sets; 0 when both are empty.
double jaccard(std::span<const std::string> a, std::span<const std::string> b);

struct Neighbor {
  TopicId id = 0;
  /// Jaccard similarity in (0, 1].
  double similarity = 0.0;
};

/// Sparse all-pairs Jaccard over topic keywords. Symmetric, no self edges,
/// neighbours listed by ascending id.
class SimilarityIndex {
 public:
  SimilarityIndex() = default;
  explicit SimilarityIndex(std::span<const TopicMeta> topics);
  /// From explicit adjacency; mirrored edges are required and checked.
  explicit SimilarityIndex(std::vector<std::vector<Neighbor>> adjacency);

  std::size_t size() const { return adjacency_.size(); }
  std::span<const Neighbor> neighbors(TopicId t) const { return adjacency_.at(t); }
  std::size_t edge_count() const;

 private:
  std::vector<std::vector<Neighbor>> adjacency_;
};

/// Interpolates a topic's own empirical mean with a softmax-weighted mean of
/// its sampled neighbours. nullopt when the topic is unsampled and has fewer
/// than two sampled neighbours. When no sampled neighbour exists the score is
/// the topic's own mean.
std::optional<double> contextual_score(TopicId topic, const Ledger& ledger, const SimilarityIndex& index,
                                       double temperature);

// ------------------------------------------------- reference choosers
//
// Direct transcriptions that scan the whole ledger per decision. nullopt (or
// an empty batch) signals that no topic is eligible. The incremental
// `Chooser` produces the same decisions under the same random stream.

std::optional<TopicId> brute_choose(const Ledger& ledger, Cap cap, Rng& rng);
std::optional<TopicId> greedy_choose(const Ledger& ledger, Cap cap, Rng& rng);
std::optional<TopicId> epsilon_greedy_choose(const Ledger& ledger, Cap cap, double epsilon, Rng& rng);
/// `subset` must be sorted ascending.
std::optional<TopicId> subset_greedy_choose(const Ledger& ledger, Cap cap, std::span<const TopicId> subset,
                                            Rng& rng);
std::optional<TopicId> contextual_choose(const Ledger& ledger, Cap cap, const SimilarityIndex& index,
                                         double temperature, Rng& rng);

/// Batch of up to `b` distinct topics. Exploit slots take the top of the
/// inner ranking rather than repeating its argmax.
std::vector<TopicId> batch_choose(const StrategyConfig& config, const Ledger& ledger, std::size_t b, Rng& rng,
                                  const SimilarityIndex* index = nullptr,
                                  std::span<const TopicId> subset = {});

/// ceil(rho * n) topics drawn uniformly, sorted ascending.
std::vector<TopicId> choose_subset(std::size_t n_topics, double rho, Rng& rng);

// ------------------------------------------------- incremental choosers

/// Stateful chooser for long runs. `observe` must be called after every
/// ledger change (record or retire) for the touched topic.
class Chooser {
 public:
  virtual ~Chooser() = default;
  virtual std::vector<TopicId> choose(const Ledger& ledger, std::size_t b, Rng& rng) = 0;
  virtual void observe(const Ledger& ledger, TopicId topic) = 0;
};

/// `index` is required for contextual strategies and `subset` for
/// subset_greedy; both must outlive the chooser. The chooser is initialised
/// from the current ledger contents.
std::unique_ptr<Chooser> make_chooser(const StrategyConfig& config, const Ledger& ledger,
                                      const SimilarityIndex* index = nullptr,
                                      std::span<const TopicId> subset = {});

}  // namespace topic_bandit
