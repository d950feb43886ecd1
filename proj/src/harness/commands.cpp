#include <algorithm>
#include <cmath>
#include <fstream>
#include <map>
#include <numeric>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "topic_bandit/bandit.hpp"
#include "topic_bandit/harness.hpp"
#include "topic_bandit/serialize.hpp"

#include "../core/parallel.hpp"

namespace topic_bandit::harness {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string run_stem(const std::string& label, std::uint64_t seed_index) {
  return label + "__seed" + std::to_string(seed_index);
}

std::string run_file(const std::string& label, int k, std::uint64_t seed_index) {
  return "runs/" + label + "__k" + std::to_string(k) + "__seed" + std::to_string(seed_index) + ".json";
}

std::string pulls_file(const std::string& label, std::uint64_t seed_index) {
  return "runs/" + run_stem(label, seed_index) + ".pulls.csv";
}

std::string join_ids(std::span<const TopicId> ids) {
  std::string out;
  for (std::size_t i = 0; i < ids.size(); ++i) {
    if (i > 0) out += ' ';
    out += std::to_string(ids[i]);
  }
  return out;
}

json rounded(std::span<const double> values) {
  json out = json::array();
  for (double v : values) out.push_back(round_real(v));
  return out;
}

[[noreturn]] void config_fail(int line, const std::string& where, const std::string& message) {
  throw ConfigError("line " + std::to_string(line) + ": " + where + ": " + message);
}

/// Explicit path, else the replay world, else where gen-world writes.
fs::path dataset_for(const fs::path& explicit_path, const ExperimentConfig& config, const fs::path& out,
                     const char* section) {
  if (!explicit_path.empty()) return explicit_path;
  if (config.world && config.world->kind == WorldKind::replay) return config.world->path;
  if (config.gen_world) return config.gen_world->path.empty() ? out / "world.jsonl" : config.gen_world->path;
  throw ConfigError(std::string("line 1: /") + section +
                    ": no dataset given and the config has no replay world or gen_world section");
}

json read_json_artifact(const fs::path& path) {
  std::string text;
  try {
    text = read_text_file(path);
  } catch (const std::exception& e) {
    throw ArtifactError("missing artifact " + path.string() + ": " + e.what());
  }
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw ArtifactError("corrupt artifact " + path.string() + ": " + e.what());
  }
}

void check_replay_caps(const ExperimentConfig& config, const ReplayWorld& world) {
  if (config.world->allow_cap_above_records) return;
  const auto min_records = static_cast<std::int64_t>(world.min_records_per_topic());
  for (std::size_t i = 0; i < config.strategies.size(); ++i) {
    const auto& s = config.strategies[i];
    if (!s.cap.bounded() || s.cap.limit() > min_records) {
      config_fail(config.strategy_lines[i], "/strategies/" + std::to_string(i),
                  "cap exceeds the smallest per-topic record count (" + std::to_string(min_records) +
                      "); set world.allow_cap_above_records to override");
    }
  }
}

}  // namespace

std::uint64_t run_seed(std::uint64_t master_seed, const std::string& strategy, std::uint64_t seed_index) {
  return derive_seed(master_seed, "run/" + strategy, seed_index);
}

std::vector<AggregatePoint> aggregate_trajectories(const std::vector<RunResult>& runs) {
  std::vector<std::pair<std::string, int>> order;
  std::map<std::pair<std::string, int>, std::vector<const RunResult*>> groups;
  for (const auto& r : runs) {
    const auto key = std::make_pair(r.strategy, r.k);
    auto [it, fresh] = groups.try_emplace(key);
    if (fresh) order.push_back(key);
    it->second.push_back(&r);
  }

  std::vector<AggregatePoint> out;
  for (const auto& key : order) {
    const auto& members = groups[key];
    std::vector<std::map<std::int64_t, double>> by_step(members.size());
    std::set<std::int64_t> common;
    for (std::size_t i = 0; i < members.size(); ++i) {
      for (const auto& p : members[i]->trajectory) by_step[i][p.step] = p.achieved;
      if (i == 0) {
        for (const auto& [step, v] : by_step[0]) common.insert(step);
      } else {
        std::erase_if(common, [&](std::int64_t s) { return !by_step[i].count(s); });
      }
    }
    for (std::int64_t step : common) {
      AggregatePoint p{key.first, key.second, step, 0.0, 0.0, members.size()};
      for (const auto& m : by_step) p.mean += m.at(step);
      p.mean /= static_cast<double>(members.size());
      if (members.size() > 1) {
        double ss = 0.0;
        for (const auto& m : by_step) ss += (m.at(step) - p.mean) * (m.at(step) - p.mean);
        p.stddev = std::sqrt(ss / static_cast<double>(members.size() - 1));
      }
      out.push_back(std::move(p));
    }
  }
  return out;
}

// ------------------------------------------------------------- simulate

std::vector<RunResult> run_matrix(const ExperimentConfig& config, const fs::path& out, std::ostream& log) {
  if (!config.world) throw ConfigError("line 1: <root>: simulate needs a 'world' section");
  if (config.strategies.empty()) throw ConfigError("line 1: <root>: simulate needs at least one strategy");
  if (config.seeds.empty()) throw ConfigError("line 1: <root>: simulate needs at least one seed");
  if (config.budget < 1) throw ConfigError("line 1: <root>: simulate needs a positive 'budget'");

  const auto world = build_world(*config.world, config.master_seed);
  const std::size_t n = world->size();
  spdlog::info("world: {} with {} topics", to_string(world->kind()), n);

  for (std::size_t i = 0; i < config.strategies.size(); ++i) {
    try {
      config.strategies[i].validate(n);
    } catch (const ConfigError& e) {
      config_fail(config.strategy_lines[i], "/strategies/" + std::to_string(i), e.what());
    }
  }
  for (int k : config.ks) {
    if (static_cast<std::size_t>(k) > n) {
      config_fail(1, "/k", "k = " + std::to_string(k) + " exceeds the topic count " + std::to_string(n));
    }
  }
  if (const auto* replay = dynamic_cast<const ReplayWorld*>(world.get())) check_replay_caps(config, *replay);

  std::optional<SimilarityIndex> index;
  if (std::any_of(config.strategies.begin(), config.strategies.end(),
                  [](const StrategyConfig& s) { return s.kind == StrategyKind::contextual; })) {
    index.emplace(world->topics());
    spdlog::info("similarity index: {} edges", index->edge_count());
  }
  RunOptions options;
  options.index = index ? &*index : nullptr;

  const std::size_t n_seeds = config.seeds.size();
  const std::size_t cells = config.strategies.size() * n_seeds;
  std::vector<std::vector<RunResult>> results(cells);
  detail::parallel_for(cells, config.workers, [&](std::size_t cell) {
    const auto& strategy = config.strategies[cell / n_seeds];
    const auto seed_index = config.seeds[cell % n_seeds];
    const auto label = strategy.label();
    auto runs = run_bandit_multi(*world, strategy, config.budget, config.ks, config.checkpoint_every,
                                 run_seed(config.master_seed, label, seed_index), options);
    std::ostringstream pulls;
    write_pull_log_csv(pulls, runs.front().pull_log);
    write_text_file(out / pulls_file(label, seed_index), pulls.str());
    for (auto& r : runs) {
      auto doc = to_json(RunResult{r.strategy, r.k, r.seed, r.selected, r.empirical_means, r.trajectory, {},
                                   r.total_pulls, r.budget_unspent, r.failed_draws, r.exhausted_topics});
      doc["seed_index"] = seed_index;
      doc["pull_log_file"] = pulls_file(label, seed_index);
      write_text_file(out / run_file(label, r.k, seed_index), doc.dump(2) + "\n");
      if (r.budget_unspent) spdlog::warn("{} seed {}: stopped after {} pulls", label, seed_index, r.total_pulls);
    }
    spdlog::debug("{} seed {} done", label, seed_index);
    results[cell] = std::move(runs);
  });

  std::vector<RunResult> flat;
  json manifest_runs = json::array();
  std::ostringstream traj;
  traj << "strategy,k,seed,step,achieved\n";
  for (std::size_t cell = 0; cell < cells; ++cell) {
    const auto seed_index = config.seeds[cell % n_seeds];
    for (auto& r : results[cell]) {
      for (const auto& p : r.trajectory) {
        traj << r.strategy << ',' << r.k << ',' << seed_index << ',' << p.step << ',' << format_real(p.achieved)
             << '\n';
      }
      manifest_runs.push_back({{"strategy", r.strategy},
                               {"k", r.k},
                               {"seed_index", seed_index},
                               {"file", run_file(r.strategy, r.k, seed_index)},
                               {"pulls", pulls_file(r.strategy, seed_index)}});
      flat.push_back(std::move(r));
    }
  }
  write_text_file(out / "trajectories.csv", traj.str());

  std::ostringstream agg;
  agg << "strategy,k,step,mean,std,n_seeds\n";
  for (const auto& p : aggregate_trajectories(flat)) {
    agg << p.strategy << ',' << p.k << ',' << p.step << ',' << format_real(p.mean) << ',' << format_real(p.stddev)
        << ',' << p.n_seeds << '\n';
  }
  write_text_file(out / "aggregate.csv", agg.str());

  json world_doc;
  world_doc["kind"] = to_string(world->kind());
  world_doc["n_topics"] = n;
  json names = json::array();
  for (const auto& t : world->topics()) names.push_back(t.name);
  world_doc["topic_names"] = std::move(names);
  if (const auto means = world->true_means()) {
    world_doc["true_means"] = rounded(*means);
    std::ostringstream oracle;
    oracle << "k,value,ids\n";
    for (int k : config.ks) {
      const auto o = oracle_topk(*world, k);
      oracle << k << ',' << format_real(o.value) << ',' << join_ids(o.ids) << '\n';
    }
    write_text_file(out / "oracle.csv", oracle.str());
  } else {
    world_doc["true_means"] = nullptr;
  }
  write_text_file(out / "world.json", world_doc.dump(2) + "\n");

  json manifest;
  manifest["budget"] = config.budget;
  manifest["ks"] = config.ks;
  manifest["seeds"] = config.seeds;
  manifest["master_seed"] = config.master_seed;
  json labels = json::array();
  for (const auto& s : config.strategies) labels.push_back(s.label());
  manifest["strategies"] = std::move(labels);
  manifest["runs"] = std::move(manifest_runs);
  write_text_file(out / "manifest.json", manifest.dump(2) + "\n");

  log << "simulate: " << flat.size() << " run results (" << config.strategies.size() << " strategies x " << n_seeds
      << " seeds x " << config.ks.size() << " k) written to " << out.string() << '\n';
  return flat;
}

// ------------------------------------------------------------- gen-world

void cmd_gen_world(const ExperimentConfig& config, const fs::path& out, std::ostream& log) {
  const GenWorldConfig gen = config.gen_world.value_or(GenWorldConfig{});
  const fs::path path = gen.path.empty() ? out / "world.jsonl" : gen.path;
  const auto records = generate_replay_records(gen.gen, gen.seed.value_or(derive_seed(config.master_seed, "gen_world")));
  write_replay_dataset(path, records);
  log << "gen-world: " << records.size() << " records over " << gen.gen.n_topics << " topics written to "
      << path.string() << '\n';
}

// ------------------------------------------------------------- scaling

bool cmd_scaling(const ExperimentConfig& config, const fs::path& out, std::ostream& log, bool assert_monotone) {
  if (!config.scaling) throw ConfigError("line 1: <root>: scaling needs a 'scaling' section");
  ScalingSpec spec = config.scaling->spec;
  spec.seed = config.scaling->seed.value_or(config.master_seed);
  spec.workers = std::max(spec.workers, config.workers);
  const auto curve = scaling_study(spec);

  std::ostringstream csv;
  csv << "k,n_topics,mean,ci_halfwidth,reps\n";
  for (const auto& p : curve.points) {
    csv << curve.k << ',' << p.n_topics << ',' << format_real(p.expected_topk) << ',' << format_real(p.ci_halfwidth)
        << ',' << p.reps << '\n';
  }
  write_text_file(out / "scaling.csv", csv.str());
  log << csv.str();

  bool monotone = true;
  for (std::size_t i = 1; i < curve.points.size(); ++i) {
    const auto& a = curve.points[i - 1];
    const auto& b = curve.points[i];
    const double slack = 2.0 * std::max(a.ci_halfwidth, b.ci_halfwidth);
    if (b.expected_topk < a.expected_topk - slack) {
      monotone = false;
      log << "scaling: mean decreases from n=" << a.n_topics << " to n=" << b.n_topics << '\n';
    }
  }
  if (assert_monotone) log << "scaling: monotone check " << (monotone ? "passed" : "FAILED") << '\n';
  return monotone || !assert_monotone;
}

// ------------------------------------------------------------- cost

void cmd_cost(const ExperimentConfig& config, const fs::path& out, std::ostream& log) {
  if (!config.cost) spdlog::info("no cost section; using the calibrated sheet");
  const CostSpec spec = config.cost.value_or(CostSpec{});
  spec.sheet.validate();

  std::ostringstream csv;
  csv << "requests,search,translation,qe,total\n";
  log << "requests,search,translation,qe,total\n";
  for (std::int64_t n : spec.requests) {
    const auto e = cost_estimate(n, spec.sheet);
    csv << n << ',' << format_real(e.search) << ',' << format_real(e.translation) << ',' << format_real(e.qe) << ','
        << format_real(e.total) << '\n';
    log << n << ", " << std::llround(e.search) << ", " << std::llround(e.translation) << ", " << std::llround(e.qe)
        << ", " << std::llround(e.total) << '\n';
  }
  write_text_file(out / "cost.csv", csv.str());
  const double derived = derive_search_request_cost();
  log << "search cost per request from token counts: " << format_real(derived) << " (" << format_real(derived * 20000)
      << " per 20000 requests)\n";
}

// ------------------------------------------------------------- rank utility

void cmd_rank_utility(const ExperimentConfig& config, const fs::path& out, std::ostream& log) {
  if (!config.rank_utility) throw ConfigError("line 1: <root>: rank-utility needs a 'rank_utility' section");
  const auto& ru = *config.rank_utility;
  const auto dataset = replay_load(dataset_for(ru.dataset, config, out, "rank_utility"));

  std::ostringstream csv;
  csv << "strategy,size,power,avg_difficulty,avg_adjacent_gap,rank_similarity\n";
  json reports = json::array();
  for (SubsetStrategy s : ru.strategies) {
    RankUtilitySpec spec = ru.spec;
    spec.strategy = s;
    spec.seed = ru.seed.value_or(config.master_seed);
    const auto report = rank_utility(*dataset, spec);
    json rows = json::array();
    for (const auto& r : report.rows) {
      csv << to_string(s) << ',' << r.size << ',' << format_real(r.power) << ',' << format_real(r.avg_difficulty)
          << ',' << format_real(r.avg_adjacent_gap) << ',' << format_real(r.rank_similarity) << '\n';
      rows.push_back({{"size", r.size},
                      {"power", round_real(r.power)},
                      {"avg_difficulty", round_real(r.avg_difficulty)},
                      {"avg_adjacent_gap", round_real(r.avg_adjacent_gap)},
                      {"rank_similarity", round_real(r.rank_similarity)}});
    }
    reports.push_back({{"strategy", to_string(s)}, {"models", report.models}, {"rows", std::move(rows)}});
  }
  write_text_file(out / "rank_utility.csv", csv.str());
  write_text_file(out / "rank_utility.json", reports.dump(2) + "\n");
  log << csv.str();
}

// ------------------------------------------------------------- cross rank

void cmd_cross_rank(const ExperimentConfig& config, const fs::path& out, std::ostream& log) {
  const CrossRankConfig cr = config.cross_rank.value_or(CrossRankConfig{});
  const auto dataset = replay_load(dataset_for(cr.dataset, config, out, "cross_rank"));
  const auto dims = cr.dimensions.empty() ? dataset->dimensions() : cr.dimensions;

  std::ostringstream csv;
  csv << "dim_a,dim_b,k,avg_rank\n";
  for (const auto& a : dims) {
    for (const auto& b : dims) {
      csv << a << ',' << b << ',' << cr.k << ',' << format_real(cross_rank(*dataset, a, b, cr.k)) << '\n';
    }
  }
  write_text_file(out / "cross_rank.csv", csv.str());
  log << csv.str();
}

// ------------------------------------------------------------- report

void cmd_report(const fs::path& dir, std::ostream& log) {
  const json manifest = read_json_artifact(dir / "manifest.json");
  const json world_doc = read_json_artifact(dir / "world.json");

  std::vector<double> true_means;
  std::size_t n_topics = 0;
  try {
    n_topics = world_doc.at("n_topics").get<std::size_t>();
    if (!world_doc.at("true_means").is_null()) true_means = world_doc.at("true_means").get<std::vector<double>>();
  } catch (const json::exception& e) {
    throw ArtifactError("corrupt world.json: " + std::string(e.what()));
  }
  if (!true_means.empty() && true_means.size() != n_topics) throw ArtifactError("world.json true_means length mismatch");

  struct Row {
    std::string strategy;
    int k = 0;
    std::size_t seeds = 0;
    double achieved = 0.0;
    double regret = 0.0;
    double topics_pulled = 0.0;
    double pulls_per_topic = 0.0;
    std::int64_t max_pulls = 0;
  };
  std::vector<Row> rows;
  std::map<std::pair<std::string, int>, std::size_t> row_of;
  std::map<int, OracleSelection> oracles;
  std::map<int, std::set<std::int64_t>> steps_by_k;

  std::ostringstream long_csv;
  long_csv << "strategy,k,seed,step,achieved\n";

  std::map<std::string, std::vector<Observation>> pull_cache;
  json runs;
  try {
    runs = manifest.at("runs");
  } catch (const json::exception& e) {
    throw ArtifactError("corrupt manifest.json: " + std::string(e.what()));
  }
  for (const auto& entry : runs) {
    std::string file, pulls_name;
    std::uint64_t seed_index = 0;
    try {
      file = entry.at("file").get<std::string>();
      pulls_name = entry.at("pulls").get<std::string>();
      seed_index = entry.at("seed_index").get<std::uint64_t>();
    } catch (const json::exception& e) {
      throw ArtifactError("corrupt manifest entry: " + std::string(e.what()));
    }
    const RunResult run = run_result_from_json(read_json_artifact(dir / file));

    auto cached = pull_cache.find(pulls_name);
    if (cached == pull_cache.end()) {
      std::ifstream in(dir / pulls_name);
      if (!in) throw ArtifactError("missing artifact " + (dir / pulls_name).string());
      cached = pull_cache.emplace(pulls_name, read_pull_log_csv(in)).first;
    }
    const auto& pulls = cached->second;

    if (static_cast<std::int64_t>(pulls.size()) != run.total_pulls) {
      throw ArtifactError(file + ": pull log has " + std::to_string(pulls.size()) + " rows, run reports " +
                          std::to_string(run.total_pulls));
    }
    Ledger ledger(n_topics);
    for (std::size_t i = 0; i < pulls.size(); ++i) {
      if (pulls[i].step != static_cast<std::int64_t>(i + 1)) throw ArtifactError(pulls_name + ": steps out of sequence");
      if (pulls[i].topic_id >= n_topics) throw ArtifactError(pulls_name + ": topic id out of range");
      ledger.record(pulls[i]);
    }

    // The stored selection must be a top-k of the recomputed empirical means.
    if (run.selected.size() != static_cast<std::size_t>(run.k) || run.empirical_means.size() != run.selected.size()) {
      throw ArtifactError(file + ": selection size differs from k");
    }
    std::set<TopicId> chosen;
    double worst_chosen = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < run.selected.size(); ++i) {
      const TopicId t = run.selected[i];
      if (t >= n_topics || !ledger.sampled(t) || !chosen.insert(t).second) {
        throw ArtifactError(file + ": selected topic " + std::to_string(t) + " is invalid or unsampled");
      }
      const double m = *ledger.mean(t);
      if (std::abs(m - run.empirical_means[i]) > 1e-6 * std::max(1.0, std::abs(m))) {
        throw ArtifactError(file + ": stored empirical mean of topic " + std::to_string(t) +
                            " disagrees with the pull log");
      }
      worst_chosen = std::min(worst_chosen, m);
    }
    std::int64_t max_pulls = 0;
    for (TopicId t = 0; t < n_topics; ++t) {
      max_pulls = std::max(max_pulls, ledger.count(t));
      if (ledger.sampled(t) && !chosen.count(t) && *ledger.mean(t) > worst_chosen + 1e-9) {
        throw ArtifactError(file + ": selection is not a top-k of the pull log");
      }
    }

    const auto key = std::make_pair(run.strategy, run.k);
    auto [it, fresh] = row_of.try_emplace(key, rows.size());
    if (fresh) rows.push_back({run.strategy, run.k});
    Row& row = rows[it->second];
    ++row.seeds;
    row.topics_pulled += static_cast<double>(ledger.sampled_topics());
    row.pulls_per_topic += ledger.sampled_topics() > 0 ? static_cast<double>(ledger.total_pulls()) /
                                                             static_cast<double>(ledger.sampled_topics())
                                                       : 0.0;
    row.max_pulls = std::max(row.max_pulls, max_pulls);
    if (!true_means.empty()) {
      if (!oracles.count(run.k)) oracles[run.k] = oracle_topk(true_means, run.k);
      const double achieved = achieved_difficulty(run.selected, true_means);
      row.achieved += achieved;
      row.regret += std::max(0.0, oracles[run.k].value - achieved);
    }
    for (const auto& p : run.trajectory) {
      long_csv << run.strategy << ',' << run.k << ',' << seed_index << ',' << p.step << ','
               << format_real(p.achieved) << '\n';
      steps_by_k[run.k].insert(p.step);
    }
  }
  if (rows.empty()) throw ArtifactError("manifest lists no runs");

  std::ostringstream summary;
  summary << "strategy,k,n_seeds,achieved,regret,topics_pulled,pulls_per_topic,max_pulls\n";
  const auto cell = [&](double v) { return true_means.empty() ? std::string() : format_real(v); };
  for (auto& r : rows) {
    const auto s = static_cast<double>(r.seeds);
    r.achieved /= s;
    r.regret /= s;
    r.topics_pulled /= s;
    r.pulls_per_topic /= s;
    summary << r.strategy << ',' << r.k << ',' << r.seeds << ',' << cell(r.achieved) << ',' << cell(r.regret) << ','
            << format_real(r.topics_pulled) << ',' << format_real(r.pulls_per_topic) << ',' << r.max_pulls << '\n';
    log << "strategy=" << r.strategy << " k=" << r.k << " seeds=" << r.seeds;
    if (!true_means.empty()) {
      log << " achieved=" << format_real(r.achieved) << " oracle=" << format_real(oracles[r.k].value)
          << " regret=" << format_real(r.regret);
    }
    log << " topics_pulled=" << format_real(r.topics_pulled) << " pulls_per_topic=" << format_real(r.pulls_per_topic)
        << " max_pulls=" << r.max_pulls << '\n';
  }
  for (const auto& [k, o] : oracles) {
    summary << "oracle," << k << ",," << format_real(o.value) << ",0,,," << '\n';
    for (std::int64_t step : steps_by_k[k]) long_csv << "oracle," << k << ",," << step << ',' << format_real(o.value) << '\n';
  }
  write_text_file(dir / "report_summary.csv", summary.str());
  write_text_file(dir / "report_long.csv", long_csv.str());
}

}  // namespace topic_bandit::harness
