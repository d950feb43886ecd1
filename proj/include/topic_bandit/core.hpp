#pragma once

#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "topic_bandit/errors.hpp"

namespace topic_bandit {

/// Dense topic index in [0, |T|).
using TopicId = std::uint32_t;

struct TopicMeta {
  TopicId id = 0;
  std::string name;
  /// Sorted, unique, lowercase tokens. Empty for worlds without context.
  std::vector<std::string> keywords;
};

struct Observation {
  TopicId topic_id = 0;
  double difficulty = 0.0;
  /// 1-based pull index within a run.
  std::int64_t step = 0;
};

/// Maximum pulls per topic. Default-constructed caps are unbounded.
class Cap {
 public:
  constexpr Cap() = default;
  constexpr explicit Cap(std::int64_t limit) : limit_(limit) {}

  static constexpr Cap unbounded() { return Cap{}; }

  constexpr bool bounded() const { return limit_ != kUnbounded; }
  constexpr std::int64_t limit() const { return limit_; }
  constexpr bool admits(std::int64_t pulls) const { return pulls < limit_; }

  friend constexpr bool operator==(Cap, Cap) = default;

 private:
  static constexpr std::int64_t kUnbounded = std::numeric_limits<std::int64_t>::max();
  std::int64_t limit_ = kUnbounded;
};

/// Per-topic pull statistics: count, sum and sum of squares.
class Ledger {
 public:
  Ledger() = default;
  explicit Ledger(std::size_t n_topics);

  std::size_t size() const { return counts_.size(); }

  void record(const Observation& obs);

  /// Marks a topic as unable to produce further draws (exhausted replay
  /// topic). Retired topics are never eligible again.
  void retire(TopicId id);
  bool retired(TopicId id) const;

  std::int64_t count(TopicId id) const;
  double sum(TopicId id) const;
  double sum_sq(TopicId id) const;
  std::int64_t total_pulls() const { return total_pulls_; }

  /// s_t / n_t, or nullopt while the topic has no observations.
  std::optional<double> mean(TopicId id) const;

  bool sampled(TopicId id) const { return count(id) > 0; }
  bool eligible(TopicId id, Cap cap) const { return !retired(id) && cap.admits(count(id)); }

  std::size_t sampled_topics() const { return sampled_topics_; }

 private:
  void check(TopicId id) const;

  std::vector<std::int64_t> counts_;
  std::vector<double> sums_;
  std::vector<double> sums_sq_;
  std::vector<char> retired_;
  std::int64_t total_pulls_ = 0;
  std::size_t sampled_topics_ = 0;
};

struct BudgetConfig {
  std::int64_t budget = 1;
  int k = 1;
  /// Trajectory checkpoint spacing in pulls. 0 selects ceil(budget / 200).
  std::int64_t checkpoint_every = 0;

  std::int64_t checkpoint_spacing() const;
  void validate(std::size_t n_topics) const;
};

struct TrajectoryPoint {
  std::int64_t step = 0;
  /// Mean true difficulty of the top-k selection at this step.
  double achieved = 0.0;
};

struct RunResult {
  std::string strategy;
  int k = 0;
  std::uint64_t seed = 0;
  std::vector<TopicId> selected;
  std::vector<double> empirical_means;
  std::vector<TrajectoryPoint> trajectory;
  std::vector<Observation> pull_log;
  std::int64_t total_pulls = 0;
  /// Every topic became ineligible before the budget ran out.
  bool budget_unspent = false;
  std::int64_t failed_draws = 0;
  std::vector<TopicId> exhausted_topics;
};

}  // namespace topic_bandit
