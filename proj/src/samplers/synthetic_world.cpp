#include "topic_bandit/synthetic_world.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace topic_bandit {

namespace {

class SyntheticSession final : public DrawSession {
 public:
  explicit SyntheticSession(const SyntheticWorld& world) : world_(world) {}

  std::vector<DrawOutcome> draw_batch(std::span<const TopicId> topics, Rng& rng) override {
    std::vector<DrawOutcome> out;
    out.reserve(topics.size());
    for (TopicId t : topics) out.push_back({DrawStatus::ok, world_.draw(t, rng), {}});
    return out;
  }

 private:
  const SyntheticWorld& world_;
};

}  // namespace

void SyntheticWorldConfig::validate() const {
  if (n_topics < 1) throw ConfigError("n_topics must be >= 1");
  if (!(sigma2 > 0.0)) throw ConfigError("sigma2 must be > 0");
  if (!(clamp_lo < clamp_hi)) throw ConfigError("clamp bounds must satisfy lo < hi");
  if (clusters < 1) throw ConfigError("clusters must be >= 1");
  if (!(cluster_mu_spread >= 0.0)) throw ConfigError("cluster_mu_spread must be >= 0");
  gmm.validate();
}

std::vector<double> sample_topic_means(const SyntheticWorldConfig& config, Rng& rng) {
  const std::size_t n_clusters = std::min(config.clusters, config.n_topics);
  std::vector<double> cluster_means(n_clusters);
  for (auto& m : cluster_means) m = config.gmm.sample(rng);

  std::vector<double> means(config.n_topics);
  for (std::size_t t = 0; t < config.n_topics; ++t) {
    means[t] = cluster_means[t % n_clusters];
    if (config.cluster_mu_spread > 0.0) means[t] += rng.normal(0.0, config.cluster_mu_spread);
  }
  return means;
}

SyntheticWorld::SyntheticWorld(const SyntheticWorldConfig& config, std::uint64_t seed)
    : config_(config), sigma_(0.0) {
  config_.validate();
  config_.clusters = std::min(config_.clusters, config_.n_topics);
  sigma_ = std::sqrt(config_.sigma2);

  Rng rng(seed);
  true_means_ = sample_topic_means(config_, rng);

  topics_.reserve(config_.n_topics);
  for (std::size_t t = 0; t < config_.n_topics; ++t) {
    TopicMeta meta;
    meta.id = static_cast<TopicId>(t);
    const std::size_t cluster = t % config_.clusters;
    meta.name = "topic " + std::to_string(t) + " cluster " + std::to_string(cluster);
    for (std::size_t i = 0; i < config_.tokens_shared; ++i) {
      meta.keywords.push_back("c" + std::to_string(cluster) + "k" + std::to_string(i));
    }
    for (std::size_t i = 0; i < config_.tokens_unique; ++i) {
      meta.keywords.push_back("t" + std::to_string(t) + "u" + std::to_string(i));
    }
    std::sort(meta.keywords.begin(), meta.keywords.end());
    topics_.push_back(std::move(meta));
  }
}

double SyntheticWorld::draw(TopicId topic, Rng& rng) const {
  if (topic >= topics_.size()) throw InvalidTopicError("topic id " + std::to_string(topic) + " out of range");
  const double d = rng.normal(true_means_[topic], sigma_);
  return std::clamp(d, config_.clamp_lo, config_.clamp_hi);
}

std::unique_ptr<DrawSession> SyntheticWorld::open_session() const {
  return std::make_unique<SyntheticSession>(*this);
}

}  // namespace topic_bandit
