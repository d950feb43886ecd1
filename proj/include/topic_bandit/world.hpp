#pragma once

#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "topic_bandit/core.hpp"
#include "topic_bandit/rng.hpp"

namespace topic_bandit {

enum class WorldKind { synthetic, replay, external };

const char* to_string(WorldKind kind);

enum class DrawStatus {
  ok,
  /// The topic cannot produce another draw in this run.
  exhausted,
  /// Transient failure (adapter timeout, malformed or out-of-range reply).
  failed,
};

struct DrawOutcome {
  DrawStatus status = DrawStatus::ok;
  double difficulty = 0.0;
  std::string message;
};

/// Per-run draw state. Sessions are not shared between runs.
class DrawSession {
 public:
  virtual ~DrawSession() = default;
  /// One draw per listed topic, returned in the order requested.
  virtual std::vector<DrawOutcome> draw_batch(std::span<const TopicId> topics, Rng& rng) = 0;
};

/// A sampling source. Worlds are immutable once built and may be shared by
/// concurrent runs; all mutable draw state lives in sessions.
class World {
 public:
  virtual ~World() = default;

  virtual WorldKind kind() const = 0;
  const std::vector<TopicMeta>& topics() const { return topics_; }
  std::size_t size() const { return topics_.size(); }

  /// E[d | topic] for every topic, when the world knows it.
  std::optional<std::span<const double>> true_means() const {
    if (true_means_.empty()) return std::nullopt;
    return std::span<const double>(true_means_);
  }

  virtual std::unique_ptr<DrawSession> open_session() const = 0;

 protected:
  World() = default;
  World(std::vector<TopicMeta> topics, std::vector<double> true_means)
      : topics_(std::move(topics)), true_means_(std::move(true_means)) {}

  std::vector<TopicMeta> topics_;
  std::vector<double> true_means_;
};

}  // namespace topic_bandit
