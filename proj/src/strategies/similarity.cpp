#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>
#include <unordered_map>

#include "topic_bandit/strategies.hpp"

namespace topic_bandit {

const char* to_string(StrategyKind kind) {
  switch (kind) {
    case StrategyKind::brute:
      return "brute";
    case StrategyKind::greedy:
      return "greedy";
    case StrategyKind::epsilon_greedy:
      return "epsilon_greedy";
    case StrategyKind::subset_greedy:
      return "subset_greedy";
    case StrategyKind::contextual:
      return "contextual";
  }
  return "unknown";
}

StrategyKind parse_strategy_kind(std::string_view text) {
  for (auto k : {StrategyKind::brute, StrategyKind::greedy, StrategyKind::epsilon_greedy, StrategyKind::subset_greedy,
                 StrategyKind::contextual}) {
    if (text == to_string(k)) return k;
  }
  throw ConfigError("unknown strategy kind `" + std::string(text) + "`");
}

void StrategyConfig::validate(std::size_t n_topics) const {
  if (cap.bounded() && cap.limit() < 1) throw ConfigError("cap must be >= 1 or unbounded");
  if (batch < 1 || batch > n_topics) {
    throw ConfigError("batch size must lie in [1, " + std::to_string(n_topics) + "]");
  }
  if (kind == StrategyKind::epsilon_greedy && !(epsilon >= 0.0 && epsilon <= 1.0)) {
    throw ConfigError("epsilon must lie in [0, 1]");
  }
  if (kind == StrategyKind::subset_greedy && !(rho > 0.0 && rho <= 1.0)) throw ConfigError("rho must lie in (0, 1]");
  if (kind == StrategyKind::contextual && !(temperature > 0.0)) throw ConfigError("temperature must be > 0");
}

std::vector<std::string> keywords_from_name(std::string_view name) {
  std::vector<std::string> out;
  std::string cur;
  for (unsigned char c : name) {
    if (std::isalnum(c)) {
      cur.push_back(static_cast<char>(std::tolower(c)));
    } else if (!cur.empty()) {
      out.push_back(std::move(cur));
      cur.clear();
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

std::vector<std::string> normalize_keywords(std::vector<std::string> keywords) {
  for (auto& k : keywords) {
    std::transform(k.begin(), k.end(), k.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
  }
  std::sort(keywords.begin(), keywords.end());
  keywords.erase(std::unique(keywords.begin(), keywords.end()), keywords.end());
  return keywords;
}

double jaccard(std::span<const std::string> a, std::span<const std::string> b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t common = 0;
  auto i = a.begin();
  auto j = b.begin();
  while (i != a.end() && j != b.end()) {
    if (*i < *j) {
      ++i;
    } else if (*j < *i) {
      ++j;
    } else {
      ++common;
      ++i;
      ++j;
    }
  }
  return static_cast<double>(common) / static_cast<double>(a.size() + b.size() - common);
}

SimilarityIndex::SimilarityIndex(std::span<const TopicMeta> topics) : adjacency_(topics.size()) {
  std::unordered_map<std::string, std::vector<TopicId>> postings;
  for (const auto& t : topics) {
    for (const auto& k : t.keywords) postings[k].push_back(t.id);
  }
  std::vector<TopicId> candidates;
  for (const auto& t : topics) {
    candidates.clear();
    for (const auto& k : t.keywords) {
      const auto& p = postings[k];
      candidates.insert(candidates.end(), p.begin(), p.end());
    }
    std::sort(candidates.begin(), candidates.end());
    candidates.erase(std::unique(candidates.begin(), candidates.end()), candidates.end());
    for (TopicId o : candidates) {
      if (o == t.id) continue;
      const double s = jaccard(t.keywords, topics[o].keywords);
      if (s > 0.0) adjacency_[t.id].push_back({o, s});
    }
  }
}

SimilarityIndex::SimilarityIndex(std::vector<std::vector<Neighbor>> adjacency) : adjacency_(std::move(adjacency)) {
  for (TopicId t = 0; t < adjacency_.size(); ++t) {
    auto& list = adjacency_[t];
    std::sort(list.begin(), list.end(), [](const Neighbor& a, const Neighbor& b) { return a.id < b.id; });
    for (const auto& n : list) {
      if (n.id == t) throw ConfigError("similarity index has a self edge at " + std::to_string(t));
      if (n.id >= adjacency_.size()) throw ConfigError("similarity index neighbour out of range");
      if (!(n.similarity > 0.0 && n.similarity <= 1.0)) throw ConfigError("similarity must lie in (0, 1]");
    }
  }
  for (TopicId t = 0; t < adjacency_.size(); ++t) {
    for (const auto& n : adjacency_[t]) {
      const auto& back = adjacency_[n.id];
      auto it = std::lower_bound(back.begin(), back.end(), t,
                                 [](const Neighbor& x, TopicId id) { return x.id < id; });
      if (it == back.end() || it->id != t || it->similarity != n.similarity) {
        throw ConfigError("similarity index is not symmetric");
      }
    }
  }
}

std::size_t SimilarityIndex::edge_count() const {
  std::size_t n = 0;
  for (const auto& a : adjacency_) n += a.size();
  return n / 2;
}

std::optional<double> contextual_score(TopicId topic, const Ledger& ledger, const SimilarityIndex& index,
                                       double temperature) {
  const auto own_n = ledger.count(topic);
  const auto nbrs = index.neighbors(topic);

  std::size_t sampled = 0;
  double max_logit = -std::numeric_limits<double>::infinity();
  for (const auto& n : nbrs) {
    if (ledger.count(n.id) > 0) {
      ++sampled;
      max_logit = std::max(max_logit, n.similarity / temperature);
    }
  }
  if (own_n == 0 && sampled < 2) return std::nullopt;

  const double beta = own_n == 0 ? 0.0 : own_n == 1 ? 0.5 : 1.0;
  const double own = own_n > 0 ? *ledger.mean(topic) : 0.0;
  if (beta == 1.0 || sampled == 0) return own;

  double z = 0.0;
  double weighted = 0.0;
  for (const auto& n : nbrs) {
    if (ledger.count(n.id) == 0) continue;
    const double w = std::exp(n.similarity / temperature - max_logit);
    z += w;
    weighted += w * *ledger.mean(n.id);
  }
  return beta * own + (1.0 - beta) * (weighted / z);
}

std::vector<TopicId> choose_subset(std::size_t n_topics, double rho, Rng& rng) {
  const auto m = std::min(n_topics, static_cast<std::size_t>(std::ceil(rho * static_cast<double>(n_topics) - 1e-9)));
  std::vector<TopicId> all(n_topics);
  std::iota(all.begin(), all.end(), TopicId{0});
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < m; ++i) {
    const std::size_t j = i + rng.uniform_index(n_topics - i);
    std::swap(all[i], all[j]);
  }
  all.resize(std::max<std::size_t>(m, 1));
  std::sort(all.begin(), all.end());
  return all;
}

}  // namespace topic_bandit
