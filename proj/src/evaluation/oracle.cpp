#include <algorithm>
#include <numeric>

#include "topic_bandit/evaluation.hpp"

namespace topic_bandit {

namespace {

std::span<const double> require_means(const World& world) {
  auto means = world.true_means();
  if (!means) throw UnsupportedWorldError(std::string(to_string(world.kind())) + " world has no true means");
  return *means;
}

}  // namespace

const char* to_string(WorldKind kind) {
  switch (kind) {
    case WorldKind::synthetic:
      return "synthetic";
    case WorldKind::replay:
      return "replay";
    case WorldKind::external:
      return "external";
  }
  return "unknown";
}

OracleSelection oracle_topk(std::span<const double> true_means, int k) {
  if (k < 1 || static_cast<std::size_t>(k) > true_means.size()) {
    throw ConfigError("k = " + std::to_string(k) + " outside [1, " + std::to_string(true_means.size()) + "]");
  }
  std::vector<TopicId> ids(true_means.size());
  std::iota(ids.begin(), ids.end(), TopicId{0});
  const auto by_mean = [&](TopicId a, TopicId b) {
    return true_means[a] > true_means[b] || (true_means[a] == true_means[b] && a < b);
  };
  std::partial_sort(ids.begin(), ids.begin() + k, ids.end(), by_mean);
  ids.resize(static_cast<std::size_t>(k));
  OracleSelection out;
  out.value = achieved_difficulty(ids, true_means);
  out.ids = std::move(ids);
  return out;
}

OracleSelection oracle_topk(const World& world, int k) { return oracle_topk(require_means(world), k); }

double achieved_difficulty(std::span<const TopicId> selected, std::span<const double> true_means) {
  if (selected.empty()) throw ConfigError("empty selection");
  double s = 0.0;
  for (TopicId t : selected) {
    if (t >= true_means.size()) throw InvalidTopicError("topic id " + std::to_string(t) + " out of range");
    s += true_means[t];
  }
  return s / static_cast<double>(selected.size());
}

double achieved_difficulty(std::span<const TopicId> selected, const World& world) {
  return achieved_difficulty(selected, require_means(world));
}

double regret(std::span<const TopicId> selected, std::span<const double> true_means) {
  std::vector<TopicId> sorted(selected.begin(), selected.end());
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw ConfigError("selection contains duplicate topics");
  }
  const auto oracle = oracle_topk(true_means, static_cast<int>(selected.size()));
  // Clamped: the oracle set is optimal up to rounding.
  return std::max(0.0, oracle.value - achieved_difficulty(selected, true_means));
}

double regret(std::span<const TopicId> selected, const World& world) { return regret(selected, require_means(world)); }

}  // namespace topic_bandit
