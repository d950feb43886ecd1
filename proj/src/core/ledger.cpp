#include "topic_bandit/core.hpp"

#include <string>

namespace topic_bandit {

Ledger::Ledger(std::size_t n_topics)
    : counts_(n_topics, 0), sums_(n_topics, 0.0), sums_sq_(n_topics, 0.0), retired_(n_topics, 0) {}

void Ledger::check(TopicId id) const {
  if (id >= counts_.size()) {
    throw InvalidTopicError("topic id " + std::to_string(id) + " outside [0, " +
                            std::to_string(counts_.size()) + ")");
  }
}

void Ledger::record(const Observation& obs) {
  check(obs.topic_id);
  const auto t = obs.topic_id;
  if (counts_[t] == 0) ++sampled_topics_;
  ++counts_[t];
  sums_[t] += obs.difficulty;
  sums_sq_[t] += obs.difficulty * obs.difficulty;
  ++total_pulls_;
}

void Ledger::retire(TopicId id) {
  check(id);
  retired_[id] = 1;
}

bool Ledger::retired(TopicId id) const {
  check(id);
  return retired_[id] != 0;
}

std::int64_t Ledger::count(TopicId id) const {
  check(id);
  return counts_[id];
}

double Ledger::sum(TopicId id) const {
  check(id);
  return sums_[id];
}

double Ledger::sum_sq(TopicId id) const {
  check(id);
  return sums_sq_[id];
}

std::optional<double> Ledger::mean(TopicId id) const {
  check(id);
  if (counts_[id] == 0) return std::nullopt;
  return sums_[id] / static_cast<double>(counts_[id]);
}

std::int64_t BudgetConfig::checkpoint_spacing() const {
  if (checkpoint_every > 0) return checkpoint_every;
  return (budget + 199) / 200;
}

void BudgetConfig::validate(std::size_t n_topics) const {
  if (budget < 1) throw ConfigError("budget must be >= 1");
  if (k < 1) throw ConfigError("k must be >= 1");
  if (static_cast<std::size_t>(k) > n_topics) {
    throw ConfigError("k = " + std::to_string(k) + " exceeds topic count " + std::to_string(n_topics));
  }
  if (checkpoint_every < 0) throw ConfigError("checkpoint_every must be >= 0");
}

}  // namespace topic_bandit
