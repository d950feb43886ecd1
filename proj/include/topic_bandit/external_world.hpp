#pragma once

#include <chrono>
#include <cstdint>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "topic_bandit/world.hpp"

namespace topic_bandit {

struct AdapterConfig {
  /// Run through `/bin/sh -c`.
  std::string command;
  std::chrono::milliseconds timeout{60'000};
};

/// Child process speaking line-delimited JSON on stdin/stdout:
///   request  {"id": <int>, "topic": <string>}
///   response {"id": <int>, "difficulty": <number>}
/// Responses may arrive out of order and are matched by id.
class ExternalAdapter {
 public:
  explicit ExternalAdapter(AdapterConfig config);
  ~ExternalAdapter();
  ExternalAdapter(const ExternalAdapter&) = delete;
  ExternalAdapter& operator=(const ExternalAdapter&) = delete;

  /// Single request. Throws AdapterTimeoutError, MalformedResponseError or
  /// OutOfRangeError.
  double draw(const std::string& topic_name);

  /// Sends every request before reading any reply, so up to
  /// `topic_names.size()` requests are in flight at once.
  std::vector<DrawOutcome> draw_batch(std::span<const std::string> topic_names);

  enum class ReplyKind { ok, timeout, malformed, out_of_range, broken };
  struct Reply {
    ReplyKind kind = ReplyKind::timeout;
    double value = 0.0;
    std::string message = "no response before timeout";
  };

 private:
  std::vector<Reply> exchange(std::span<const std::string> topic_names);
  void send_line(const std::string& line);
  /// Next complete line, or false on timeout. Throws AdapterError on EOF.
  bool read_line(std::string& line, std::chrono::steady_clock::time_point deadline);
  void shutdown();

  AdapterConfig config_;
  int pid_ = -1;
  int to_child_ = -1;
  int from_child_ = -1;
  std::string buffer_;
  std::int64_t next_id_ = 1;
  /// Ids whose requests already failed; late replies to them are dropped.
  std::set<std::int64_t> abandoned_;
};

/// World backed by an external adapter. No true means are available.
class ExternalWorld final : public World {
 public:
  ExternalWorld(std::vector<std::string> topic_names, AdapterConfig config);

  WorldKind kind() const override { return WorldKind::external; }
  /// Spawns a dedicated adapter process for the session.
  std::unique_ptr<DrawSession> open_session() const override;

  const AdapterConfig& adapter_config() const { return config_; }

 private:
  AdapterConfig config_;
};

}  // namespace topic_bandit
