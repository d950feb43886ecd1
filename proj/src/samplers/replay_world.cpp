#include "topic_bandit/replay_world.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "topic_bandit/serialize.hpp"
#include "topic_bandit/strategies.hpp"

namespace topic_bandit {

using nlohmann::json;

double difficulty_from_qe(const std::map<std::string, double>& qe) {
  if (qe.empty()) throw ConfigError("record has no qe scores");
  double s = 0.0;
  for (const auto& [dim, score] : qe) s += score;
  return 100.0 - s / static_cast<double>(qe.size());
}

std::filesystem::path manifest_path_for(const std::filesystem::path& dataset) {
  auto p = dataset;
  p.replace_extension(".manifest.json");
  return p;
}

ReplayWorld::ReplayWorld(std::vector<ReplayRecord> records) : records_(std::move(records)) {
  if (records_.empty()) throw LoadError("dataset has no records");

  std::map<std::int64_t, std::vector<std::size_t>> grouped;
  for (std::size_t i = 0; i < records_.size(); ++i) grouped[records_[i].source_topic_id].push_back(i);

  std::set<std::string> dims;
  for (const auto& r : records_) {
    for (const auto& [d, v] : r.qe) dims.insert(d);
  }
  dimensions_.assign(dims.begin(), dims.end());

  for (auto& [source_id, idx] : grouped) {
    const auto dense = static_cast<TopicId>(topics_.size());
    std::set<std::pair<std::int64_t, std::int64_t>> seen;
    double total = 0.0;
    for (std::size_t i : idx) {
      if (!seen.insert({source_id, records_[i].sample_id}).second) {
        throw IntegrityError("duplicate sample_id " + std::to_string(records_[i].sample_id) + " in topic " +
                             std::to_string(source_id));
      }
      total += records_[i].difficulty;
    }
    const auto& first = records_[idx.front()];
    TopicMeta meta;
    meta.id = dense;
    meta.name = first.topic_name;
    meta.keywords = first.keywords.empty() ? keywords_from_name(first.topic_name) : normalize_keywords(first.keywords);
    topics_.push_back(std::move(meta));
    true_means_.push_back(total / static_cast<double>(idx.size()));
    source_ids_.push_back(source_id);
    by_topic_.push_back(std::move(idx));
  }
}

std::size_t ReplayWorld::min_records_per_topic() const {
  std::size_t m = by_topic_.front().size();
  for (const auto& v : by_topic_) m = std::min(m, v.size());
  return m;
}

ReplayManifest ReplayWorld::manifest() const {
  ReplayManifest m;
  m.topic_count = topics_.size();
  for (std::size_t t = 0; t < topics_.size(); ++t) m.record_counts[source_ids_[t]] = by_topic_[t].size();
  return m;
}

std::unique_ptr<DrawSession> ReplayWorld::open_session() const { return std::make_unique<ReplaySession>(*this); }

ReplaySession::ReplaySession(const ReplayWorld& world) : world_(world) {
  remaining_.reserve(world.size());
  for (TopicId t = 0; t < world.size(); ++t) remaining_.push_back(world.topic_records(t));
}

const ReplayRecord& ReplaySession::draw_record(TopicId topic, Rng& rng) {
  if (topic >= remaining_.size()) throw InvalidTopicError("topic id " + std::to_string(topic) + " out of range");
  auto& pool = remaining_[topic];
  if (pool.empty()) throw ExhaustedError("topic " + std::to_string(topic) + " has no undrawn records");
  const std::size_t pick = rng.uniform_index(pool.size());
  const std::size_t record = pool[pick];
  // Keep the pool in record order so a given seed always means the same record.
  pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(pick));
  return world_.records()[record];
}

double ReplaySession::draw(TopicId topic, Rng& rng) { return draw_record(topic, rng).difficulty; }

std::vector<DrawOutcome> ReplaySession::draw_batch(std::span<const TopicId> topics, Rng& rng) {
  std::vector<DrawOutcome> out;
  out.reserve(topics.size());
  for (TopicId t : topics) {
    try {
      out.push_back({DrawStatus::ok, draw(t, rng), {}});
    } catch (const ExhaustedError& e) {
      out.push_back({DrawStatus::exhausted, 0.0, e.what()});
    }
  }
  return out;
}

namespace {

ReplayRecord parse_record(const std::string& line, std::size_t line_no) {
  json j;
  try {
    j = json::parse(line);
  } catch (const json::parse_error& e) {
    throw LoadError(std::string("invalid JSON: ") + e.what(), line_no);
  }
  if (!j.is_object()) throw LoadError("record is not a JSON object", line_no);
  ReplayRecord r;
  try {
    r.source_topic_id = j.at("topic_id").get<std::int64_t>();
    r.topic_name = j.at("topic_name").get<std::string>();
    r.keywords = j.at("keywords").get<std::vector<std::string>>();
    r.sample_id = j.at("sample_id").get<std::int64_t>();
    if (j.contains("text") && !j["text"].is_null()) r.text = j["text"].get<std::string>();
    if (j.contains("source_url") && !j["source_url"].is_null()) r.source_url = j["source_url"].get<std::string>();
    r.qe = j.at("qe").get<std::map<std::string, double>>();
    r.difficulty = j.at("difficulty").get<double>();
  } catch (const json::exception& e) {
    throw LoadError(std::string("bad record: ") + e.what(), line_no);
  }
  if (r.qe.empty()) throw LoadError("qe object is empty", line_no);
  for (const auto& [dim, score] : r.qe) {
    if (!(score >= 0.0 && score <= 100.0)) {
      throw LoadError("qe score for `" + dim + "` outside [0, 100]", line_no);
    }
  }
  const double recomputed = difficulty_from_qe(r.qe);
  if (std::abs(recomputed - r.difficulty) > 1e-6) {
    throw IntegrityError("line " + std::to_string(line_no) + ": stored difficulty " + format_real(r.difficulty) +
                         " != 100 - mean(qe) = " + format_real(recomputed));
  }
  r.difficulty = recomputed;
  return r;
}

}  // namespace

std::unique_ptr<ReplayWorld> replay_load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw LoadError("cannot open dataset " + path.string());
  std::vector<ReplayRecord> records;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    records.push_back(parse_record(line, line_no));
  }
  auto world = std::make_unique<ReplayWorld>(std::move(records));

  const auto manifest_file = manifest_path_for(path);
  if (std::filesystem::exists(manifest_file)) {
    json m;
    try {
      m = json::parse(read_text_file(manifest_file));
    } catch (const json::exception& e) {
      throw LoadError("manifest " + manifest_file.string() + ": " + e.what());
    }
    const auto actual = world->manifest();
    try {
      if (m.at("topic_count").get<std::size_t>() != actual.topic_count) {
        throw IntegrityError("manifest topic_count disagrees with dataset");
      }
      for (const auto& entry : m.at("record_counts")) {
        const auto id = entry.at("topic_id").get<std::int64_t>();
        const auto n = entry.at("records").get<std::size_t>();
        auto it = actual.record_counts.find(id);
        if (it == actual.record_counts.end() || it->second != n) {
          throw IntegrityError("manifest record count for topic " + std::to_string(id) + " disagrees with dataset");
        }
      }
    } catch (const json::exception& e) {
      throw LoadError("manifest " + manifest_file.string() + ": " + e.what());
    }
  }
  return world;
}

void write_replay_dataset(const std::filesystem::path& path, const std::vector<ReplayRecord>& records) {
  std::ostringstream data;
  std::map<std::int64_t, std::size_t> counts;
  for (const auto& r : records) {
    json j;
    j["topic_id"] = r.source_topic_id;
    j["topic_name"] = r.topic_name;
    j["keywords"] = r.keywords;
    j["sample_id"] = r.sample_id;
    if (r.text) j["text"] = *r.text;
    if (r.source_url) j["source_url"] = *r.source_url;
    json qe = json::object();
    for (const auto& [dim, score] : r.qe) qe[dim] = score;
    j["qe"] = std::move(qe);
    j["difficulty"] = r.difficulty;
    data << j.dump() << '\n';
    ++counts[r.source_topic_id];
  }
  write_text_file(path, data.str());

  json m;
  m["topic_count"] = counts.size();
  json rc = json::array();
  for (const auto& [id, n] : counts) rc.push_back({{"topic_id", id}, {"records", n}});
  m["record_counts"] = std::move(rc);
  write_text_file(manifest_path_for(path), m.dump(2) + "\n");
}

double estimate_sigma2(const ReplayWorld& world) {
  double ss = 0.0;
  std::size_t dof = 0;
  for (TopicId t = 0; t < world.size(); ++t) {
    const auto& idx = world.topic_records(t);
    if (idx.size() < 2) continue;
    double mean = 0.0;
    for (std::size_t i : idx) mean += world.records()[i].difficulty;
    mean /= static_cast<double>(idx.size());
    for (std::size_t i : idx) {
      const double d = world.records()[i].difficulty - mean;
      ss += d * d;
    }
    dof += idx.size() - 1;
  }
  if (dof == 0) throw EstimationError("no topic has two or more records");
  return ss / static_cast<double>(dof);
}

}  // namespace topic_bandit
