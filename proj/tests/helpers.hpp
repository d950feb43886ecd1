#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include <unistd.h>

#include "topic_bandit/core.hpp"
#include "topic_bandit/rng.hpp"
#include "topic_bandit/world.hpp"

namespace tbtest {

using namespace topic_bandit;

/// World with given true means. Draws are Normal(mu, sd) clamped to [0, 100],
/// optionally rounded to integers so that ties are common.
class TableWorld final : public World {
 public:
  TableWorld(std::vector<double> means, double sd, bool integer_draws = false,
             std::vector<std::vector<std::string>> keywords = {})
      : World(make_topics(means.size(), std::move(keywords)), means), sd_(sd), integer_(integer_draws) {}

  WorldKind kind() const override { return WorldKind::synthetic; }

  std::unique_ptr<DrawSession> open_session() const override { return std::make_unique<Session>(*this); }

 private:
  class Session final : public DrawSession {
   public:
    explicit Session(const TableWorld& w) : w_(w) {}
    std::vector<DrawOutcome> draw_batch(std::span<const TopicId> topics, Rng& rng) override {
      std::vector<DrawOutcome> out;
      for (TopicId t : topics) {
        double d = w_.sd_ > 0.0 ? rng.normal(w_.true_means_[t], w_.sd_) : w_.true_means_[t];
        if (w_.integer_) d = std::round(d);
        out.push_back({DrawStatus::ok, std::clamp(d, 0.0, 100.0), {}});
      }
      return out;
    }

   private:
    const TableWorld& w_;
  };

  static std::vector<TopicMeta> make_topics(std::size_t n, std::vector<std::vector<std::string>> keywords) {
    std::vector<TopicMeta> topics(n);
    for (std::size_t i = 0; i < n; ++i) {
      topics[i].id = static_cast<TopicId>(i);
      topics[i].name = "t" + std::to_string(i);
      if (i < keywords.size()) topics[i].keywords = std::move(keywords[i]);
    }
    return topics;
  }

  double sd_;
  bool integer_;
};

/// One observation per listed value; nullopt leaves the topic unsampled.
inline Ledger ledger_from(const std::vector<std::optional<double>>& values) {
  Ledger l(values.size());
  std::int64_t step = 0;
  for (std::size_t t = 0; t < values.size(); ++t) {
    if (values[t]) l.record({static_cast<TopicId>(t), *values[t], ++step});
  }
  return l;
}

}  // namespace tbtest

namespace tbtest {

/// Fresh empty directory under the system temp dir.
inline std::filesystem::path scratch_dir(const std::string& name) {
  const auto dir = std::filesystem::temp_directory_path() /
                   ("topic_bandit_test_" + std::to_string(::getpid()) + "_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace tbtest
