#pragma once

// Selection primitives shared by the reference and incremental choosers so
// that both consume a random stream identically.

#include <algorithm>
#include <span>
#include <vector>

#include "topic_bandit/core.hpp"
#include "topic_bandit/rng.hpp"

namespace topic_bandit::detail {

struct Ranked {
  double score = 0.0;
  TopicId id = 0;
};

/// Descending score, ascending id.
struct RankedOrder {
  bool operator()(const Ranked& a, const Ranked& b) const {
    return a.score > b.score || (a.score == b.score && a.id < b.id);
  }
};

/// Bernoulli(p) that leaves the stream untouched when p is 0 or 1.
inline bool flip(double p, Rng& rng) {
  if (p >= 1.0) return true;
  if (p <= 0.0) return false;
  return rng.uniform01() < p;
}

/// Moves `m` uniformly chosen ids out of an ascending `pool` into `out`.
inline void pick_uniform(std::vector<TopicId>& pool, std::size_t m, Rng& rng, std::vector<TopicId>& out) {
  for (std::size_t i = 0; i < m && !pool.empty(); ++i) {
    const std::size_t r = rng.uniform_index(pool.size());
    out.push_back(pool[r]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(r));
  }
}

/// Appends up to `m` ids from a range in RankedOrder, skipping `excluded`.
/// A tie group that straddles the cut contributes a uniform sample.
template <class It>
std::size_t take_top(It first, It last, std::size_t m, std::span<const TopicId> excluded, Rng& rng,
                     std::vector<TopicId>& out) {
  const auto skip = [&](TopicId t) { return std::find(excluded.begin(), excluded.end(), t) != excluded.end(); };
  std::size_t taken = 0;
  std::vector<TopicId> group;
  while (first != last && taken < m) {
    const double score = first->score;
    group.clear();
    for (; first != last && first->score == score; ++first) {
      if (!skip(first->id)) group.push_back(first->id);
    }
    const std::size_t need = m - taken;
    if (group.size() <= need) {
      out.insert(out.end(), group.begin(), group.end());
      taken += group.size();
    } else {
      pick_uniform(group, need, rng, out);
      taken += need;
    }
  }
  return taken;
}

}  // namespace topic_bandit::detail
