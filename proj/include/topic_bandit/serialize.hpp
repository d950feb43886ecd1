#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include <json.hpp>

#include "topic_bandit/core.hpp"

namespace topic_bandit {

/// Nine significant digits, the precision of every emitted float.
std::string format_real(double value);

/// Rounds to nine significant digits so JSON output carries no more.
double round_real(double value);

/// CSV with header `step,topic_id,difficulty`.
void write_pull_log_csv(std::ostream& out, const std::vector<Observation>& log);
std::vector<Observation> read_pull_log_csv(std::istream& in);

nlohmann::json to_json(const RunResult& result);
RunResult run_result_from_json(const nlohmann::json& doc);

/// Writes text atomically enough for per-cell outputs: creates parent dirs.
void write_text_file(const std::filesystem::path& path, const std::string& text);
std::string read_text_file(const std::filesystem::path& path);

}  // namespace topic_bandit
