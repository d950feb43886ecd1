#include <doctest.h>

#include <fstream>
#include <sstream>

#include "helpers.hpp"
#include "topic_bandit/harness.hpp"
#include "topic_bandit/serialize.hpp"

using namespace topic_bandit;
using namespace topic_bandit::harness;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

/// Message of the ConfigError raised by parsing `text`, or "" when it parses.
std::string config_error(const std::string& text) {
  try {
    (void)parse_experiment_config(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}

const char* kSmall = R"({
  "world": {"kind": "synthetic", "n_topics": 40, "seed": 5},
  "strategies": [
    {"kind": "greedy", "cap": 5},
    {"name": "eps", "kind": "epsilon_greedy", "cap": 5}
  ],
  "budget": 120,
  "checkpoint_every": 20,
  "k": [1, 3],
  "seeds": 2,
  "master_seed": 11
})";

}  // namespace

TEST_CASE("config errors name the offending line") {
  CHECK(config_error(kSmall).empty());

  const auto bad_eps = config_error(R"({
  "strategies": [
    {"kind": "greedy"},
    {"kind": "epsilon_greedy",
     "epsilon": 1.5}
  ]
})");
  CHECK(bad_eps.rfind("line 4:", 0) == 0);
  CHECK(bad_eps.find("epsilon") != std::string::npos);

  const auto unknown = config_error("{\n  \"budget\": 10,\n  \"bugdet\": 10\n}");
  CHECK(unknown.rfind("line 3:", 0) == 0);
  CHECK(unknown.find("bugdet") != std::string::npos);

  CHECK(config_error("{\n  \"budget\": 0\n}").rfind("line 2:", 0) == 0);
  CHECK(config_error("{\n  \"budget\": \"ten\"\n}").rfind("line 2:", 0) == 0);
  CHECK(config_error("{\n  \"k\": [3, 3]\n}").rfind("line 2:", 0) == 0);
  CHECK(config_error("{\n\n  \"world\": {\"kind\": \"moon\"}\n}").rfind("line 3:", 0) == 0);
  CHECK(config_error(R"({"strategies": [{"kind": "greedy"}, {"kind": "greedy"}]})").find("duplicate") !=
        std::string::npos);
  CHECK(config_error(R"({"strategies": [{"name": "a b", "kind": "greedy"}]})").rfind("line 1:", 0) == 0);
}

TEST_CASE("syntax errors report a line") {
  const auto e = config_error("{\n  \"budget\": 10,\n  \"k\": [1,\n}");
  CHECK(e.rfind("line 4:", 0) == 0);
  CHECK(e.find("invalid JSON") != std::string::npos);
  CHECK(config_error("").rfind("line", 0) == 0);
}

TEST_CASE("config values are read") {
  const auto c = parse_experiment_config(R"({
    "world": {"kind": "replay", "path": "data/x.jsonl"},
    "strategies": [{"kind": "subset_greedy", "rho": 0.2, "cap": "inf", "batch": 4}],
    "budget": 9, "k": 2, "seeds": [3, 7], "workers": 2,
    "cost": {"search": 0.01, "requests": [5]}
  })",
                                         "/base");
  REQUIRE(c.world);
  CHECK(c.world->kind == WorldKind::replay);
  CHECK(c.world->path == fs::path("/base/data/x.jsonl"));
  CHECK(!c.strategies[0].cap.bounded());
  CHECK(c.strategies[0].rho == 0.2);
  CHECK(c.strategies[0].batch == 4);
  CHECK(c.ks == std::vector<int>{2});
  CHECK(c.seeds == std::vector<std::uint64_t>{3, 7});
  CHECK(c.workers == 2);
  REQUIRE(c.cost);
  CHECK(c.cost->sheet.search.per_request == 0.01);
  CHECK(c.cost->sheet.qe.per_request == calibrated_cost_sheet().qe.per_request);
  CHECK(c.cost->requests == std::vector<std::int64_t>{5});
}

TEST_CASE("exit codes by error type") {
  CHECK(exit_code_for(ConfigError("x")) == kExitConfig);
  CHECK(exit_code_for(LoadError("x", 3)) == kExitWorld);
  CHECK(exit_code_for(IntegrityError("x")) == kExitWorld);
  CHECK(exit_code_for(AdapterTimeoutError("x")) == kExitWorld);
  CHECK(exit_code_for(UnsupportedWorldError("x")) == kExitWorld);
  CHECK(exit_code_for(ArtifactError("x")) == kExitArtifact);
  CHECK(exit_code_for(std::runtime_error("x")) == kExitFailure);
}

TEST_CASE("minimal matrix writes one run and one aggregate row per checkpoint") {
  const auto dir = tbtest::scratch_dir("minimal");
  auto c = parse_experiment_config(R"({
    "world": {"kind": "synthetic", "n_topics": 10, "seed": 1},
    "strategies": [{"kind": "brute"}],
    "budget": 50, "checkpoint_every": 10, "k": 1, "seeds": 1
  })");
  std::ostringstream log;
  const auto runs = run_matrix(c, dir, log);
  REQUIRE(runs.size() == 1);
  CHECK(fs::exists(dir / "runs" / "brute__k1__seed0.json"));
  CHECK(fs::exists(dir / "runs" / "brute__seed0.pulls.csv"));
  std::istringstream agg(slurp(dir / "aggregate.csv"));
  std::string line;
  std::getline(agg, line);
  CHECK(line == "strategy,k,step,mean,std,n_seeds");
  std::size_t rows = 0;
  while (std::getline(agg, line)) ++rows;
  CHECK(rows == runs[0].trajectory.size());
  CHECK(rows == 5);
  CHECK(fs::exists(dir / "oracle.csv"));
  CHECK(fs::exists(dir / "world.json"));
}

TEST_CASE("aggregate mean is the average of the seeds") {
  const auto dir = tbtest::scratch_dir("two_seeds");
  const auto c = parse_experiment_config(kSmall);
  std::ostringstream log;
  const auto runs = run_matrix(c, dir, log);
  CHECK(runs.size() == 8);
  const auto agg = aggregate_trajectories(runs);
  for (const auto& p : agg) {
    std::vector<double> vals;
    for (const auto& r : runs) {
      if (r.strategy != p.strategy || r.k != p.k) continue;
      for (const auto& t : r.trajectory) {
        if (t.step == p.step) vals.push_back(t.achieved);
      }
    }
    REQUIRE(vals.size() == 2);
    CHECK(std::abs(p.mean - (vals[0] + vals[1]) / 2.0) < 1e-9);
    CHECK(std::abs(p.stddev - std::abs(vals[0] - vals[1]) / std::sqrt(2.0)) < 1e-9);
    CHECK(p.n_seeds == 2);
  }
}

TEST_CASE("reruns are byte identical, with any worker count") {
  const auto a = tbtest::scratch_dir("rerun_a");
  const auto b = tbtest::scratch_dir("rerun_b");
  auto c = parse_experiment_config(kSmall);
  std::ostringstream log;
  (void)run_matrix(c, a, log);
  c.workers = 3;
  (void)run_matrix(c, b, log);
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), a);
    CHECK_MESSAGE(slurp(entry.path()) == slurp(b / rel), rel.string());
  }
}

TEST_CASE("report recomputes achieved difficulty from the pull logs") {
  const auto dir = tbtest::scratch_dir("report");
  const auto c = parse_experiment_config(kSmall);
  std::ostringstream log;
  const auto runs = run_matrix(c, dir, log);
  std::ostringstream out;
  cmd_report(dir, out);
  CHECK(out.str().find("strategy=greedy k=1 seeds=2") != std::string::npos);

  const auto world = build_world(*c.world, c.master_seed);
  std::istringstream summary(slurp(dir / "report_summary.csv"));
  std::string line;
  std::getline(summary, line);
  int oracle_rows = 0, strategy_rows = 0;
  while (std::getline(summary, line)) {
    std::vector<std::string> f;
    std::stringstream ss(line);
    for (std::string x; std::getline(ss, x, ',');) f.push_back(x);
    const int k = std::stoi(f[1]);
    if (f[0] == "oracle") {
      ++oracle_rows;
      CHECK(std::stod(f[4]) == 0.0);
      CHECK(std::abs(std::stod(f[3]) - oracle_topk(*world, k).value) < 1e-6);
      continue;
    }
    ++strategy_rows;
    double want = 0.0;
    for (const auto& r : runs) {
      if (r.strategy == f[0] && r.k == k) want += achieved_difficulty(r.selected, *world) / 2.0;
    }
    CHECK(std::abs(std::stod(f[3]) - want) < 1e-6);
    CHECK(std::stod(f[4]) >= 0.0);
  }
  CHECK(oracle_rows == 2);
  CHECK(strategy_rows == 4);
  CHECK(fs::exists(dir / "report_long.csv"));
}

TEST_CASE("report rejects damaged artifacts") {
  const auto base = tbtest::scratch_dir("damaged");
  const auto c = parse_experiment_config(kSmall);
  std::ostringstream log;
  (void)run_matrix(c, base / "ok", log);

  const auto damaged = [&](const std::string& name) {
    const auto d = base / name;
    fs::copy(base / "ok", d, fs::copy_options::recursive);
    return d;
  };
  std::ostringstream out;

  CHECK_THROWS_AS(cmd_report(base / "nowhere", out), ArtifactError);

  auto d = damaged("no_pulls");
  fs::remove(d / "runs" / "greedy__seed0.pulls.csv");
  CHECK_THROWS_AS(cmd_report(d, out), ArtifactError);

  d = damaged("bad_manifest");
  std::ofstream(d / "manifest.json") << "{ not json";
  CHECK_THROWS_AS(cmd_report(d, out), ArtifactError);

  d = damaged("truncated_pulls");
  {
    const auto p = d / "runs" / "eps__seed1.pulls.csv";
    auto text = slurp(p);
    text.resize(text.rfind('\n', text.size() - 2) + 1);
    std::ofstream(p, std::ios::binary) << text;
  }
  CHECK_THROWS_AS(cmd_report(d, out), ArtifactError);

  d = damaged("edited_mean");
  {
    const auto p = d / "runs" / "greedy__k1__seed0.json";
    auto j = nlohmann::json::parse(slurp(p));
    j["empirical_means"][0] = j["empirical_means"][0].get<double>() + 1.0;
    std::ofstream(p) << j.dump();
  }
  CHECK_THROWS_AS(cmd_report(d, out), ArtifactError);

  d = damaged("wrong_selection");
  {
    // Swap the chosen topic for the least promising sampled one.
    const auto p = d / "runs" / "greedy__k1__seed0.json";
    auto j = nlohmann::json::parse(slurp(p));
    std::ifstream in(d / "runs" / "greedy__seed0.pulls.csv");
    const auto pulls = read_pull_log_csv(in);
    Ledger l(40);
    for (const auto& o : pulls) l.record(o);
    TopicId worst = 0;
    double lo = 1e300;
    for (TopicId t = 0; t < 40; ++t) {
      if (l.sampled(t) && *l.mean(t) < lo) {
        lo = *l.mean(t);
        worst = t;
      }
    }
    j["selected"][0] = worst;
    j["empirical_means"][0] = lo;
    std::ofstream(p) << j.dump();
  }
  CHECK_THROWS_AS(cmd_report(d, out), ArtifactError);
}

TEST_CASE("replay caps above the record count are config errors") {
  const auto dir = tbtest::scratch_dir("replay_cap");
  const std::string fixture = std::string(TEST_FIXTURES) + "/replay_small.jsonl";
  std::ostringstream log;
  const auto over = parse_experiment_config(R"({
    "world": {"kind": "replay", "path": ")" + fixture + R"("},
    "strategies": [{"kind": "greedy", "cap": 26}],
    "budget": 30, "k": 1, "seeds": 1
  })");
  try {
    (void)run_matrix(over, dir, log);
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find("line 3:") != std::string::npos);
  }
  auto allowed = over;
  allowed.world->allow_cap_above_records = true;
  const auto runs = run_matrix(allowed, dir, log);
  CHECK(runs.front().total_pulls == 30);

  auto fine = over;
  fine.strategies[0].cap = Cap{25};
  CHECK(run_matrix(fine, dir, log).front().total_pulls == 30);
}

TEST_CASE("missing replay data is a world error") {
  const auto c = parse_experiment_config(R"({
    "world": {"kind": "replay", "path": "/nonexistent/data.jsonl"},
    "strategies": [{"kind": "greedy"}], "budget": 3, "seeds": 1
  })");
  std::ostringstream log;
  try {
    (void)run_matrix(c, tbtest::scratch_dir("missing"), log);
    FAIL("expected an error");
  } catch (const std::exception& e) {
    CHECK(exit_code_for(e) == kExitWorld);
  }
}

TEST_CASE("cost and scaling commands write their tables") {
  const auto dir = tbtest::scratch_dir("cost_scaling");
  auto c = parse_experiment_config(R"({
    "scaling": {"sizes": [50, 500], "k": 5, "reps": 10, "seed": 1}
  })");
  std::ostringstream log;
  cmd_cost(c, dir, log);
  CHECK(log.str().find("20000, 87, 2, 15, 104") != std::string::npos);
  CHECK(log.str().find("200000, 870, 20, 150, 1040") != std::string::npos);
  CHECK(slurp(dir / "cost.csv").rfind("requests,search,translation,qe,total\n", 0) == 0);

  CHECK(cmd_scaling(c, dir, log, true));
  const auto csv = slurp(dir / "scaling.csv");
  CHECK(csv.rfind("k,n_topics,mean,ci_halfwidth,reps\n5,50,", 0) == 0);
  CHECK(csv.find("\n5,500,") != std::string::npos);

  c.scaling.reset();
  CHECK_THROWS_AS(cmd_scaling(c, dir, log), ConfigError);
}

TEST_CASE("gen-world output feeds rank-utility and cross-rank") {
  const auto dir = tbtest::scratch_dir("gen_world");
  const auto c = parse_experiment_config(R"({
    "gen_world": {"n_topics": 12, "records_per_topic": 4, "languages": ["de", "ja"],
                  "models": ["a", "b"], "model_offsets": {"a": 3}, "seed": 2},
    "rank_utility": {"sizes": [10, 48], "reps": 2, "permutations": 200},
    "cross_rank": {"k": 3}
  })");
  std::ostringstream log;
  cmd_gen_world(c, dir, log);
  CHECK(fs::exists(dir / "world.jsonl"));
  CHECK(fs::exists(dir / "world.manifest.json"));
  cmd_rank_utility(c, dir, log);
  const auto ru = slurp(dir / "rank_utility.csv");
  CHECK(ru.rfind("strategy,size,power,avg_difficulty,avg_adjacent_gap,rank_similarity\n", 0) == 0);
  CHECK(ru.find("random,48,") != std::string::npos);
  CHECK(ru.find("difficult,10,") != std::string::npos);
  cmd_cross_rank(c, dir, log);
  const auto cr = slurp(dir / "cross_rank.csv");
  CHECK(cr.find("de/a,de/a,3,2\n") != std::string::npos);
}
