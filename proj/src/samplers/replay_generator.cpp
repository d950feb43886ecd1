#include <algorithm>
#include <cmath>
#include <set>

#include "topic_bandit/replay_world.hpp"

namespace topic_bandit {

void ReplayGenConfig::validate() const {
  gmm.validate();
  if (n_topics < 1) throw ConfigError("n_topics must be >= 1");
  if (records_per_topic < 1) throw ConfigError("records_per_topic must be >= 1");
  if (!(sigma2 >= 0.0)) throw ConfigError("sigma2 must be >= 0");
  if (clusters < 1) throw ConfigError("clusters must be >= 1");
  if (languages.empty() || models.empty()) throw ConfigError("at least one language and one model are required");
  if (!(score_noise >= 0.0)) throw ConfigError("score_noise must be >= 0");
  const std::set<std::string> known(models.begin(), models.end());
  if (known.size() != models.size()) throw ConfigError("duplicate model name");
  for (const auto& m : models) {
    if (m.find('/') != std::string::npos) throw ConfigError("model name '" + m + "' contains '/'");
  }
  for (const auto& [m, offset] : model_offsets) {
    if (!known.count(m)) throw ConfigError("offset given for unknown model '" + m + "'");
  }
}

std::vector<ReplayRecord> generate_replay_records(const ReplayGenConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  const double sigma = std::sqrt(config.sigma2);
  std::vector<double> cluster_means(config.clusters);
  for (auto& m : cluster_means) m = std::clamp(config.gmm.sample(rng), 0.0, 100.0);

  std::vector<ReplayRecord> out;
  out.reserve(config.n_topics * config.records_per_topic);
  std::int64_t sample_id = 0;
  for (std::size_t t = 0; t < config.n_topics; ++t) {
    const std::size_t c = t % config.clusters;
    const double mu = cluster_means[c];
    for (std::size_t j = 0; j < config.records_per_topic; ++j) {
      ReplayRecord rec;
      rec.source_topic_id = static_cast<std::int64_t>(t);
      rec.topic_name = "topic " + std::to_string(t) + " cluster " + std::to_string(c);
      rec.keywords = {"c" + std::to_string(c) + "k0", "c" + std::to_string(c) + "k1", "t" + std::to_string(t)};
      rec.sample_id = sample_id++;
      rec.text = "sample " + std::to_string(j) + " of topic " + std::to_string(t);
      const double latent = sigma > 0.0 ? rng.normal(mu, sigma) : mu;
      for (const auto& lang : config.languages) {
        for (const auto& model : config.models) {
          const auto it = config.model_offsets.find(model);
          double score = 100.0 - latent + (it == config.model_offsets.end() ? 0.0 : it->second);
          if (config.score_noise > 0.0) score += rng.normal(0.0, config.score_noise);
          rec.qe[lang + "/" + model] = std::clamp(score, 0.0, 100.0);
        }
      }
      rec.difficulty = difficulty_from_qe(rec.qe);
      out.push_back(std::move(rec));
    }
  }
  return out;
}

}  // namespace topic_bandit
