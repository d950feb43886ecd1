#include "topic_bandit/serialize.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "topic_bandit/errors.hpp"

namespace topic_bandit {

using nlohmann::json;

std::string format_real(double value) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

double round_real(double value) { return std::strtod(format_real(value).c_str(), nullptr); }

void write_pull_log_csv(std::ostream& out, const std::vector<Observation>& log) {
  out << "step,topic_id,difficulty\n";
  for (const auto& o : log) out << o.step << ',' << o.topic_id << ',' << format_real(o.difficulty) << '\n';
}

std::vector<Observation> read_pull_log_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "step,topic_id,difficulty") {
    throw ArtifactError("pull log: missing header `step,topic_id,difficulty`");
  }
  std::vector<Observation> log;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    Observation o;
    long long step = 0;
    unsigned long topic = 0;
    double d = 0.0;
    if (std::sscanf(line.c_str(), "%lld,%lu,%lf", &step, &topic, &d) != 3) {
      throw ArtifactError("pull log line " + std::to_string(line_no) + ": malformed row");
    }
    o.step = step;
    o.topic_id = static_cast<TopicId>(topic);
    o.difficulty = d;
    log.push_back(o);
  }
  return log;
}

json to_json(const RunResult& r) {
  json doc;
  doc["strategy"] = r.strategy;
  doc["k"] = r.k;
  doc["seed"] = r.seed;
  doc["selected"] = r.selected;
  json means = json::array();
  for (double m : r.empirical_means) means.push_back(round_real(m));
  doc["empirical_means"] = std::move(means);
  json traj = json::array();
  for (const auto& p : r.trajectory) traj.push_back({{"step", p.step}, {"achieved", round_real(p.achieved)}});
  doc["trajectory"] = std::move(traj);
  json log = json::array();
  for (const auto& o : r.pull_log) {
    log.push_back({{"step", o.step}, {"topic_id", o.topic_id}, {"difficulty", round_real(o.difficulty)}});
  }
  doc["pull_log"] = std::move(log);
  doc["total_pulls"] = r.total_pulls;
  doc["budget_unspent"] = r.budget_unspent;
  doc["failed_draws"] = r.failed_draws;
  doc["exhausted_topics"] = r.exhausted_topics;
  return doc;
}

RunResult run_result_from_json(const json& doc) {
  try {
    RunResult r;
    r.strategy = doc.at("strategy").get<std::string>();
    r.k = doc.at("k").get<int>();
    r.seed = doc.at("seed").get<std::uint64_t>();
    r.selected = doc.at("selected").get<std::vector<TopicId>>();
    r.empirical_means = doc.at("empirical_means").get<std::vector<double>>();
    for (const auto& p : doc.at("trajectory")) {
      r.trajectory.push_back({p.at("step").get<std::int64_t>(), p.at("achieved").get<double>()});
    }
    for (const auto& o : doc.at("pull_log")) {
      r.pull_log.push_back(
          {o.at("topic_id").get<TopicId>(), o.at("difficulty").get<double>(), o.at("step").get<std::int64_t>()});
    }
    r.total_pulls = doc.at("total_pulls").get<std::int64_t>();
    r.budget_unspent = doc.at("budget_unspent").get<bool>();
    r.failed_draws = doc.at("failed_draws").get<std::int64_t>();
    r.exhausted_topics = doc.at("exhausted_topics").get<std::vector<TopicId>>();
    return r;
  } catch (const json::exception& e) {
    throw ArtifactError(std::string("run result: ") + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw Error("failed writing " + path.string());
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace topic_bandit
