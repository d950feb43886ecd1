#include <algorithm>
#include <numeric>

#include "topic_bandit/evaluation.hpp"

namespace topic_bandit {

std::vector<double> dimension_difficulty(const ReplayWorld& dataset, const std::string& dim) {
  const auto& dims = dataset.dimensions();
  if (!std::binary_search(dims.begin(), dims.end(), dim)) throw ConfigError("unknown QE dimension '" + dim + "'");
  std::vector<double> out(dataset.size());
  for (TopicId t = 0; t < dataset.size(); ++t) {
    double s = 0.0;
    std::size_t seen = 0;
    for (std::size_t r : dataset.topic_records(t)) {
      const auto& qe = dataset.records()[r].qe;
      if (auto it = qe.find(dim); it != qe.end()) {
        s += it->second;
        ++seen;
      }
    }
    if (seen == 0) {
      throw ConfigError("topic " + std::to_string(dataset.source_topic_id(t)) + " has no score for '" + dim + "'");
    }
    out[t] = 100.0 - s / static_cast<double>(seen);
  }
  return out;
}

double cross_rank(const ReplayWorld& dataset, const std::string& dim_a, const std::string& dim_b, int k) {
  if (k < 1 || static_cast<std::size_t>(k) > dataset.size()) {
    throw ConfigError("k = " + std::to_string(k) + " outside [1, " + std::to_string(dataset.size()) + "]");
  }
  const auto rank_of = [&](const std::string& dim) {
    const auto diff = dimension_difficulty(dataset, dim);
    std::vector<TopicId> order(diff.size());
    std::iota(order.begin(), order.end(), TopicId{0});
    std::stable_sort(order.begin(), order.end(), [&](TopicId a, TopicId b) { return diff[a] > diff[b]; });
    return order;
  };
  const auto order_a = rank_of(dim_a);
  const auto order_b = rank_of(dim_b);
  std::vector<std::size_t> position(order_b.size());
  for (std::size_t i = 0; i < order_b.size(); ++i) position[order_b[i]] = i + 1;
  double s = 0.0;
  for (int i = 0; i < k; ++i) s += static_cast<double>(position[order_a[static_cast<std::size_t>(i)]]);
  return s / k;
}

}  // namespace topic_bandit
