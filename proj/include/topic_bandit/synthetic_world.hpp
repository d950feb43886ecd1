#pragma once

#include <vector>

#include "topic_bandit/gmm.hpp"
#include "topic_bandit/world.hpp"

namespace topic_bandit {

struct SyntheticWorldConfig {
  std::size_t n_topics = 1000;
  GmmParams gmm = default_gmm();
  /// Within-topic variance of a single draw.
  double sigma2 = 25.0;
  double clamp_lo = 0.0;
  double clamp_hi = 100.0;
  /// Topics are assigned to keyword clusters round-robin.
  std::size_t clusters = 1000;
  /// Std-dev of a topic mean around its cluster mean.
  double cluster_mu_spread = 0.0;
  std::size_t tokens_shared = 3;
  std::size_t tokens_unique = 2;

  void validate() const;
};

/// Topic means only: cluster means drawn from the mixture, each topic offset
/// from its cluster mean. Shared by `SyntheticWorld` and the scaling study.
std::vector<double> sample_topic_means(const SyntheticWorldConfig& config, Rng& rng);

/// Arms with Normal(mu_t, sigma2) draws clamped to the configured bounds.
class SyntheticWorld final : public World {
 public:
  SyntheticWorld(const SyntheticWorldConfig& config, std::uint64_t seed);

  WorldKind kind() const override { return WorldKind::synthetic; }
  std::unique_ptr<DrawSession> open_session() const override;

  /// One clamped draw from the topic's distribution.
  double draw(TopicId topic, Rng& rng) const;

  const SyntheticWorldConfig& config() const { return config_; }
  std::size_t cluster_of(TopicId topic) const { return topic % config_.clusters; }

 private:
  SyntheticWorldConfig config_;
  double sigma_;
};

}  // namespace topic_bandit
