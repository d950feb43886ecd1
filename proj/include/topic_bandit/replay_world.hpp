#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "topic_bandit/gmm.hpp"
#include "topic_bandit/world.hpp"

namespace topic_bandit {

/// One pre-scored sample. `qe` maps a dimension (conventionally
/// "<language>/<model>") to a quality score in [0, 100].
struct ReplayRecord {
  std::int64_t source_topic_id = 0;
  std::string topic_name;
  std::vector<std::string> keywords;
  std::int64_t sample_id = 0;
  std::optional<std::string> text;
  std::optional<std::string> source_url;
  std::map<std::string, double> qe;
  double difficulty = 0.0;
};

/// 100 minus the mean QE score.
double difficulty_from_qe(const std::map<std::string, double>& qe);

/// Sidecar summary of a dataset: topic count and per-topic record counts,
/// keyed by the dataset's own topic ids.
struct ReplayManifest {
  std::size_t topic_count = 0;
  std::map<std::int64_t, std::size_t> record_counts;
};

/// `data.jsonl` -> `data.manifest.json`.
std::filesystem::path manifest_path_for(const std::filesystem::path& dataset);

class ReplayWorld final : public World {
 public:
  /// Topic ids are remapped to dense indices in ascending source-id order.
  explicit ReplayWorld(std::vector<ReplayRecord> records);

  WorldKind kind() const override { return WorldKind::replay; }
  std::unique_ptr<DrawSession> open_session() const override;

  const std::vector<ReplayRecord>& records() const { return records_; }
  /// Indices into `records()` for one dense topic id.
  const std::vector<std::size_t>& topic_records(TopicId topic) const { return by_topic_.at(topic); }
  std::int64_t source_topic_id(TopicId topic) const { return source_ids_.at(topic); }
  std::size_t min_records_per_topic() const;
  /// Sorted union of QE dimension names.
  const std::vector<std::string>& dimensions() const { return dimensions_; }
  ReplayManifest manifest() const;

 private:
  std::vector<ReplayRecord> records_;
  std::vector<std::vector<std::size_t>> by_topic_;
  std::vector<std::int64_t> source_ids_;
  std::vector<std::string> dimensions_;
};

/// Draw state for one run: records are drawn uniformly without replacement.
class ReplaySession final : public DrawSession {
 public:
  explicit ReplaySession(const ReplayWorld& world);

  /// Throws ExhaustedError once the topic has no undrawn records.
  double draw(TopicId topic, Rng& rng);
  /// Like `draw` but also reports which record was used.
  const ReplayRecord& draw_record(TopicId topic, Rng& rng);
  std::size_t remaining(TopicId topic) const { return remaining_.at(topic).size(); }

  std::vector<DrawOutcome> draw_batch(std::span<const TopicId> topics, Rng& rng) override;

 private:
  const ReplayWorld& world_;
  std::vector<std::vector<std::size_t>> remaining_;
};

/// Parses a JSON-lines dataset. Checks each stored difficulty against its QE
/// scores (1e-6) and, when present, the sidecar manifest.
std::unique_ptr<ReplayWorld> replay_load(const std::filesystem::path& path);

/// Writes the dataset and its sidecar manifest.
void write_replay_dataset(const std::filesystem::path& path, const std::vector<ReplayRecord>& records);

/// Synthetic pre-scored dataset. Each record has a latent difficulty drawn
/// around its topic mean; every (language, model) dimension scores it as
/// 100 - latent + offset(model) + noise, clamped to [0, 100].
struct ReplayGenConfig {
  std::size_t n_topics = 200;
  std::size_t records_per_topic = 30;
  GmmParams gmm = default_gmm();
  /// Within-topic variance of the latent difficulty.
  double sigma2 = 25.0;
  std::size_t clusters = 50;
  std::vector<std::string> languages{"de"};
  std::vector<std::string> models{"model_a", "model_b", "model_c"};
  /// Added to a model's QE score on every sample. Missing models get 0.
  std::map<std::string, double> model_offsets;
  /// Std-dev of independent per-dimension score noise.
  double score_noise = 0.0;

  void validate() const;
};

std::vector<ReplayRecord> generate_replay_records(const ReplayGenConfig& config, std::uint64_t seed);

/// Pooled within-topic variance over topics with at least two records.
double estimate_sigma2(const ReplayWorld& world);

}  // namespace topic_bandit
