#include "topic_bandit/external_world.hpp"

#include <fcntl.h>
#include <poll.h>
#include <signal.h>
#include <sys/socket.h>
#include <sys/wait.h>
#include <unistd.h>

#include <cerrno>
#include <cmath>
#include <cstring>
#include <map>
#include <thread>

#include <json.hpp>

#include "topic_bandit/serialize.hpp"
#include "topic_bandit/strategies.hpp"

namespace topic_bandit {

using nlohmann::json;

namespace {

using ReplyKind = ExternalAdapter::ReplyKind;
using Reply = ExternalAdapter::Reply;

[[noreturn]] void throw_reply(const Reply& r) {
  switch (r.kind) {
    case ReplyKind::timeout:
      throw AdapterTimeoutError(r.message);
    case ReplyKind::malformed:
      throw MalformedResponseError(r.message);
    case ReplyKind::out_of_range:
      throw OutOfRangeError(r.message);
    default:
      throw AdapterError(r.message);
  }
}

}  // namespace

ExternalAdapter::ExternalAdapter(AdapterConfig config) : config_(std::move(config)) {
  if (config_.command.empty()) throw ConfigError("adapter command is empty");
  int in_pair[2];
  int out_pair[2];
  if (::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, in_pair) != 0 ||
      ::socketpair(AF_UNIX, SOCK_STREAM | SOCK_CLOEXEC, 0, out_pair) != 0) {
    throw AdapterError(std::string("socketpair: ") + std::strerror(errno));
  }
  pid_ = ::fork();
  if (pid_ < 0) throw AdapterError(std::string("fork: ") + std::strerror(errno));
  if (pid_ == 0) {
    ::dup2(in_pair[1], STDIN_FILENO);
    ::dup2(out_pair[1], STDOUT_FILENO);
    ::execl("/bin/sh", "sh", "-c", config_.command.c_str(), static_cast<char*>(nullptr));
    ::_exit(127);
  }
  ::close(in_pair[1]);
  ::close(out_pair[1]);
  to_child_ = in_pair[0];
  from_child_ = out_pair[0];
}

ExternalAdapter::~ExternalAdapter() { shutdown(); }

void ExternalAdapter::shutdown() {
  if (to_child_ >= 0) ::close(to_child_);
  if (from_child_ >= 0) ::close(from_child_);
  to_child_ = from_child_ = -1;
  if (pid_ <= 0) return;
  for (int i = 0; i < 100; ++i) {
    if (::waitpid(pid_, nullptr, WNOHANG) == pid_) {
      pid_ = -1;
      return;
    }
    std::this_thread::sleep_for(std::chrono::milliseconds(10));
  }
  ::kill(pid_, SIGKILL);
  ::waitpid(pid_, nullptr, 0);
  pid_ = -1;
}

void ExternalAdapter::send_line(const std::string& line) {
  std::size_t off = 0;
  while (off < line.size()) {
    const ssize_t n = ::send(to_child_, line.data() + off, line.size() - off, MSG_NOSIGNAL);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw AdapterError(std::string("adapter write failed: ") + std::strerror(errno));
    }
    off += static_cast<std::size_t>(n);
  }
}

bool ExternalAdapter::read_line(std::string& line, std::chrono::steady_clock::time_point deadline) {
  for (;;) {
    const auto nl = buffer_.find('\n');
    if (nl != std::string::npos) {
      line = buffer_.substr(0, nl);
      buffer_.erase(0, nl + 1);
      return true;
    }
    const auto left = std::chrono::duration_cast<std::chrono::milliseconds>(deadline - std::chrono::steady_clock::now());
    if (left.count() <= 0) return false;
    pollfd pfd{from_child_, POLLIN, 0};
    const int rc = ::poll(&pfd, 1, static_cast<int>(left.count()));
    if (rc < 0) {
      if (errno == EINTR) continue;
      throw AdapterError(std::string("poll: ") + std::strerror(errno));
    }
    if (rc == 0) return false;
    char buf[4096];
    const ssize_t n = ::recv(from_child_, buf, sizeof buf, 0);
    if (n < 0) {
      if (errno == EINTR) continue;
      throw AdapterError(std::string("adapter read failed: ") + std::strerror(errno));
    }
    if (n == 0) throw AdapterError("adapter closed its output");
    buffer_.append(buf, static_cast<std::size_t>(n));
  }
}

std::vector<ExternalAdapter::Reply> ExternalAdapter::exchange(std::span<const std::string> topic_names) {
  std::vector<std::int64_t> ids;
  std::map<std::int64_t, std::size_t> slot_of;
  std::vector<Reply> replies(topic_names.size());
  std::vector<char> answered(topic_names.size(), 0);

  std::size_t outstanding = topic_names.size();
  std::string pending_malformed;
  try {
    for (std::size_t i = 0; i < topic_names.size(); ++i) {
      const std::int64_t id = next_id_++;
      ids.push_back(id);
      slot_of[id] = i;
      send_line(json{{"id", id}, {"topic", topic_names[i]}}.dump() + "\n");
    }

    const auto deadline = std::chrono::steady_clock::now() + config_.timeout;
    std::string line;
    while (outstanding > 0 && read_line(line, deadline)) {
      json j;
      try {
        j = json::parse(line);
      } catch (const json::parse_error&) {
        pending_malformed = "unparseable response: " + line;
        --outstanding;
        continue;
      }
      if (!j.is_object() || !j.contains("id") || !j["id"].is_number_integer()) {
        pending_malformed = "response without integer id: " + line;
        --outstanding;
        continue;
      }
      const auto id = j["id"].get<std::int64_t>();
      auto it = slot_of.find(id);
      if (it == slot_of.end()) {
        if (abandoned_.erase(id) > 0) continue;
        pending_malformed = "response for unknown id " + std::to_string(id);
        --outstanding;
        continue;
      }
      const std::size_t slot = it->second;
      if (answered[slot]) {
        pending_malformed = "duplicate response for id " + std::to_string(id);
        continue;
      }
      answered[slot] = 1;
      --outstanding;
      Reply& r = replies[slot];
      if (!j.contains("difficulty") || !j["difficulty"].is_number()) {
        r = {ReplyKind::malformed, 0.0, "response without numeric difficulty: " + line};
        continue;
      }
      const double d = j["difficulty"].get<double>();
      if (!std::isfinite(d) || d < 0.0 || d > 100.0) {
        r = {ReplyKind::out_of_range, d, "difficulty " + format_real(d) + " outside [0, 100]"};
        continue;
      }
      r = {ReplyKind::ok, d, {}};
    }
  } catch (const AdapterError& e) {
    for (std::size_t i = 0; i < replies.size(); ++i) {
      if (!answered[i]) {
        replies[i] = {ReplyKind::broken, 0.0, e.what()};
        answered[i] = 1;
      }
    }
  }

  for (std::size_t i = 0; i < replies.size(); ++i) {
    if (answered[i]) continue;
    if (!pending_malformed.empty()) {
      replies[i] = {ReplyKind::malformed, 0.0, pending_malformed};
    } else {
      abandoned_.insert(ids[i]);
    }
  }
  return replies;
}

std::vector<DrawOutcome> ExternalAdapter::draw_batch(std::span<const std::string> topic_names) {
  std::vector<DrawOutcome> out;
  for (const auto& r : exchange(topic_names)) {
    if (r.kind == ReplyKind::ok) {
      out.push_back({DrawStatus::ok, r.value, {}});
    } else {
      out.push_back({DrawStatus::failed, 0.0, r.message});
    }
  }
  return out;
}

double ExternalAdapter::draw(const std::string& topic_name) {
  const std::string names[1] = {topic_name};
  const auto replies = exchange(names);
  if (replies.front().kind == ReplyKind::ok) return replies.front().value;
  throw_reply(replies.front());
}

namespace {

class ExternalSession final : public DrawSession {
 public:
  explicit ExternalSession(const ExternalWorld& world) : world_(world), adapter_(world.adapter_config()) {}

  std::vector<DrawOutcome> draw_batch(std::span<const TopicId> topics, Rng&) override {
    std::vector<std::string> names;
    names.reserve(topics.size());
    for (TopicId t : topics) names.push_back(world_.topics().at(t).name);
    return adapter_.draw_batch(names);
  }

 private:
  const ExternalWorld& world_;
  ExternalAdapter adapter_;
};

}  // namespace

ExternalWorld::ExternalWorld(std::vector<std::string> topic_names, AdapterConfig config)
    : config_(std::move(config)) {
  if (topic_names.empty()) throw ConfigError("external world needs at least one topic");
  for (std::size_t i = 0; i < topic_names.size(); ++i) {
    TopicMeta meta;
    meta.id = static_cast<TopicId>(i);
    meta.name = std::move(topic_names[i]);
    meta.keywords = keywords_from_name(meta.name);
    topics_.push_back(std::move(meta));
  }
}

std::unique_ptr<DrawSession> ExternalWorld::open_session() const { return std::make_unique<ExternalSession>(*this); }

}  // namespace topic_bandit
