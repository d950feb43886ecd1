#include <doctest.h>

#include <chrono>
#include <cmath>
#include <thread>

#include "topic_bandit/bandit.hpp"
#include "topic_bandit/external_world.hpp"

using namespace topic_bandit;
using namespace std::chrono_literals;

namespace {

AdapterConfig stub(const std::string& args, std::chrono::milliseconds timeout = 5000ms) {
  return AdapterConfig{std::string("'") + STUB_ADAPTER + "' " + args, timeout};
}

}  // namespace

TEST_CASE("adapter returns the reported difficulty") {
  ExternalAdapter a(stub("fixed 42"));
  CHECK(a.draw("anything") == 42.0);
  CHECK(a.draw("again") == 42.0);
}

TEST_CASE("adapter rejects bad replies") {
  SUBCASE("out of range") {
    ExternalAdapter a(stub("fixed 150"));
    CHECK_THROWS_AS(a.draw("t"), OutOfRangeError);
  }
  SUBCASE("not json") {
    ExternalAdapter a(stub("malformed"));
    CHECK_THROWS_AS(a.draw("t"), MalformedResponseError);
  }
  SUBCASE("missing id") {
    ExternalAdapter a(stub("missing_id"));
    CHECK_THROWS_AS(a.draw("t"), MalformedResponseError);
  }
  SUBCASE("silence times out") {
    ExternalAdapter a(stub("silent", 200ms));
    const auto start = std::chrono::steady_clock::now();
    CHECK_THROWS_AS(a.draw("t"), AdapterTimeoutError);
    CHECK(std::chrono::steady_clock::now() - start < 3s);
  }
  SUBCASE("process exit") {
    ExternalAdapter a(stub("exit"));
    CHECK_THROWS_AS(a.draw("t"), AdapterError);
  }
  SUBCASE("empty command") { CHECK_THROWS_AS(ExternalAdapter(AdapterConfig{"", 100ms}), ConfigError); }
}

TEST_CASE("adapter noise has the stub's mean") {
  ExternalAdapter a(stub("normal 30 5 7"));
  double s = 0.0;
  const int n = 1000;
  for (int i = 0; i < n; ++i) s += a.draw("t");
  // 4 standard errors of 5 / sqrt(1000).
  CHECK(std::abs(s / n - 30.0) < 0.64);
}

TEST_CASE("out of order replies are matched by id") {
  ExternalAdapter a(stub("reverse 4"));
  const std::vector<std::string> names{"a", "bbb", "cc", "dddddd"};
  const auto out = a.draw_batch(names);
  REQUIRE(out.size() == 4);
  for (std::size_t i = 0; i < 4; ++i) {
    CHECK(out[i].status == DrawStatus::ok);
    CHECK(out[i].difficulty == static_cast<double>(names[i].size()));
  }
}

TEST_CASE("late reply to a timed out request is discarded") {
  ExternalAdapter a(stub("slow_first 400 17", 100ms));
  CHECK_THROWS_AS(a.draw("t"), AdapterTimeoutError);
  std::this_thread::sleep_for(500ms);
  // The stale 99 for the first id must not answer this request.
  CHECK(a.draw("t") == 17.0);
}

TEST_CASE("external runs count failed draws") {
  ExternalWorld w({"alpha topic", "beta topic", "gamma topic"}, stub("flaky 3 12"));
  REQUIRE(!w.true_means());
  const auto r = run_bandit(w, StrategyConfig{"", StrategyKind::brute, Cap{}}, BudgetConfig{30, 2, 0}, 1);
  CHECK(r.total_pulls == 30);
  CHECK(r.failed_draws > 0);
  CHECK(!r.budget_unspent);
  CHECK(r.selected.size() == 2);
  for (double m : r.empirical_means) CHECK(m == 12.0);
  CHECK(r.trajectory.empty());
}

TEST_CASE("a dead adapter stops the run before anything is sampled") {
  ExternalWorld w({"alpha", "beta"}, stub("exit", 500ms));
  RunOptions opts;
  opts.max_consecutive_failures = 5;
  // No topic was ever observed, so no selection exists.
  CHECK_THROWS_AS(
      run_bandit(w, StrategyConfig{"", StrategyKind::greedy, Cap{}}, BudgetConfig{50, 1, 0}, 1, opts),
      InsufficientDataError);
}
