#include <doctest.h>

#include <set>

#include "helpers.hpp"
#include "topic_bandit/bandit.hpp"
#include "topic_bandit/evaluation.hpp"
#include "topic_bandit/strategies.hpp"

using namespace topic_bandit;
using tbtest::ledger_from;
using tbtest::TableWorld;

namespace {

const StrategyKind kAllKinds[] = {StrategyKind::brute, StrategyKind::greedy, StrategyKind::epsilon_greedy,
                                  StrategyKind::subset_greedy, StrategyKind::contextual};

std::vector<std::vector<std::string>> clustered_keywords(std::size_t n, std::size_t clusters) {
  std::vector<std::vector<std::string>> kw(n);
  for (std::size_t t = 0; t < n; ++t) {
    kw[t] = {"c" + std::to_string(t % clusters), "t" + std::to_string(t)};
    if (t % 3 == 0) kw[t].push_back("shared");
    std::sort(kw[t].begin(), kw[t].end());
  }
  return kw;
}

std::vector<TopicId> pulls_of(const RunResult& r) {
  std::vector<TopicId> out;
  for (const auto& o : r.pull_log) out.push_back(o.topic_id);
  return out;
}

}  // namespace

TEST_CASE("brute picks uniformly among eligible topics") {
  const auto l = ledger_from({1.0, 2.0, std::nullopt, 4.0});
  Rng rng(1);
  std::vector<int> freq(4);
  const int n = 40000;
  for (int i = 0; i < n; ++i) ++freq[*brute_choose(l, Cap{}, rng)];
  for (int f : freq) CHECK(std::abs(f / static_cast<double>(n) - 0.25) < 0.01);

  // Topic 1 sits at the cap.
  for (int i = 0; i < 10000; ++i) CHECK(*brute_choose(l, Cap{1}, rng) == 2);
  CHECK(!brute_choose(ledger_from({1.0, 2.0}), Cap{1}, rng));
}

TEST_CASE("greedy explores first, then exploits under the cap") {
  Rng rng(2);
  CHECK(*greedy_choose(ledger_from({10.0, std::nullopt, 15.0}), Cap{}, rng) == 1);
  CHECK(*greedy_choose(ledger_from({10.0, 20.0, 15.0}), Cap{}, rng) == 1);
  auto l = ledger_from({10.0, 20.0, 15.0});
  l.record({1, 20.0, 4});
  CHECK(*greedy_choose(l, Cap{2}, rng) == 2);
  CHECK(!greedy_choose(ledger_from({1.0}), Cap{1}, rng));

  // Never a sampled topic while an unsampled one exists.
  for (int i = 0; i < 1000; ++i) {
    std::vector<std::optional<double>> v(10);
    for (auto& x : v) {
      if (rng.uniform01() < 0.7) x = rng.uniform01() * 100.0;
    }
    const auto l2 = ledger_from(v);
    const auto pick = greedy_choose(l2, Cap{}, rng);
    REQUIRE(pick);
    if (l2.sampled_topics() < 10) CHECK(!l2.sampled(*pick));
  }
}

TEST_CASE("greedy breaks ties uniformly") {
  const auto l = ledger_from({30.0, 30.0, 10.0});
  Rng rng(4);
  int zero = 0;
  for (int i = 0; i < 10000; ++i) zero += *greedy_choose(l, Cap{}, rng) == 0;
  CHECK(std::abs(zero / 10000.0 - 0.5) < 0.02);
}

TEST_CASE("epsilon greedy explores with probability epsilon") {
  const auto l = ledger_from({50.0, std::nullopt, 10.0, std::nullopt});
  Rng rng(3);
  int explored = 0;
  const int n = 100000;
  for (int i = 0; i < n; ++i) explored += !l.sampled(*epsilon_greedy_choose(l, Cap{}, 0.7, rng));
  CHECK(std::abs(explored / static_cast<double>(n) - 0.70) < 0.01);

  for (int i = 0; i < 10000; ++i) CHECK(*epsilon_greedy_choose(l, Cap{}, 0.0, rng) == 0);
}

TEST_CASE("epsilon boundaries reproduce pure exploration and pure exploitation") {
  Rng src(5);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::optional<double>> v(12);
    for (auto& x : v) {
      if (src.uniform01() < 0.5) x = std::round(src.uniform01() * 20.0);
    }
    const auto l = ledger_from(v);
    const auto seed = src.engine()();
    Rng a(seed), b(seed);
    if (l.sampled_topics() < 12) {
      // Exploring: identical to greedy's uniform pick over unsampled topics.
      CHECK(epsilon_greedy_choose(l, Cap{}, 1.0, a) == greedy_choose(l, Cap{}, b));
    }
    if (l.sampled_topics() > 0) {
      // Exploiting: identical to greedy over the same ledger with unsampled topics retired.
      Ledger only(12);
      std::int64_t step = 0;
      for (TopicId t = 0; t < 12; ++t) {
        if (v[t]) {
          only.record({t, *v[t], ++step});
        } else {
          only.retire(t);
        }
      }
      Rng c(seed), d(seed);
      CHECK(epsilon_greedy_choose(l, Cap{}, 0.0, c) == greedy_choose(only, Cap{}, d));
    }
  }
}

TEST_CASE("epsilon greedy with nothing sampled falls back to exploration") {
  Rng rng(6);
  const auto l = ledger_from({std::nullopt, std::nullopt});
  for (int i = 0; i < 100; ++i) CHECK(epsilon_greedy_choose(l, Cap{}, 0.0, rng).has_value());
}

TEST_CASE("subset greedy") {
  const TableWorld w({10, 20, 30, 40, 50, 60, 70, 80, 90, 95}, 5.0);
  const BudgetConfig budget{200, 3, 0};

  SUBCASE("full subset equals greedy") {
    for (std::uint64_t seed = 0; seed < 5; ++seed) {
      StrategyConfig sub{"", StrategyKind::subset_greedy, Cap{25}};
      sub.rho = 1.0;
      const auto a = run_bandit(w, sub, budget, seed);
      const auto b = run_bandit(w, StrategyConfig{"", StrategyKind::greedy, Cap{25}}, budget, seed);
      CHECK(pulls_of(a) == pulls_of(b));
    }
  }
  SUBCASE("singleton subset pulls one topic") {
    StrategyConfig sub{"", StrategyKind::subset_greedy, Cap{}};
    sub.rho = 0.1;
    const auto r = run_bandit(w, sub, BudgetConfig{50, 1, 0}, 7);
    const auto ids = pulls_of(r);
    const std::set<TopicId> pulled(ids.begin(), ids.end());
    CHECK(pulled.size() == 1);
  }
  SUBCASE("best topic outside the subset is missed") {
    std::vector<double> means(100, 30.0);
    for (std::size_t i = 0; i < means.size(); ++i) means[i] = 20.0 + 0.3 * static_cast<double>(i % 50);
    means[42] = 90.0;
    const TableWorld big(means, 2.0);
    StrategyConfig sub{"", StrategyKind::subset_greedy, Cap{25}};
    int checked = 0;
    for (std::uint64_t seed = 0; checked < 5 && seed < 100; ++seed) {
      Rng srng(derive_seed(seed, "subset"));
      const auto s = choose_subset(100, 0.1, srng);
      if (std::binary_search(s.begin(), s.end(), TopicId{42})) continue;
      const auto r = run_bandit(big, sub, BudgetConfig{500, 1, 0}, seed);
      CHECK(achieved_difficulty(r.selected, big) < oracle_topk(big, 1).value);
      for (TopicId t : pulls_of(r)) CHECK(std::binary_search(s.begin(), s.end(), t));
      ++checked;
    }
    CHECK(checked == 5);
  }
}

TEST_CASE("contextual without neighbours matches greedy") {
  const TableWorld w({5, 15, 25, 35, 45, 55, 65, 75}, 8.0, true);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto a = run_bandit(w, StrategyConfig{"", StrategyKind::contextual, Cap{10}}, BudgetConfig{60, 2, 0}, seed);
    const auto b = run_bandit(w, StrategyConfig{"", StrategyKind::greedy, Cap{10}}, BudgetConfig{60, 2, 0}, seed);
    CHECK(pulls_of(a) == pulls_of(b));
  }
}

TEST_CASE("contextual picks an unsampled topic with strong neighbours") {
  // Topic 0 is unsampled; its neighbours 1 and 2 hold the top means but are capped.
  const SimilarityIndex idx({{{1, 0.5}, {2, 0.4}}, {{0, 0.5}}, {{0, 0.4}}, {}, {}, {}});
  Ledger l(6);
  std::int64_t step = 0;
  for (auto [t, d] : std::vector<std::pair<TopicId, double>>{
           {1, 90}, {1, 90}, {2, 95}, {2, 95}, {3, 10}, {4, 20}, {5, 30}}) {
    l.record({t, d, ++step});
  }
  const Cap cap{2};
  TopicId best = 0;
  double best_score = -1.0;
  for (TopicId t = 0; t < 6; ++t) {
    const auto s = contextual_score(t, l, idx, 1.0);
    REQUIRE(s);
    if (l.eligible(t, cap) && *s > best_score) {
      best_score = *s;
      best = t;
    }
  }
  CHECK(best == 0);
  Rng rng(1);
  CHECK(*contextual_choose(l, cap, idx, 1.0, rng) == 0);

  // Once every topic has two draws the choice is the plain mean argmax.
  Ledger full(6);
  step = 0;
  for (TopicId t = 0; t < 6; ++t) {
    full.record({t, 10.0 * t, ++step});
    full.record({t, 10.0 * t + 1, ++step});
  }
  CHECK(*contextual_choose(full, Cap{}, idx, 1.0, rng) == 5);
}

TEST_CASE("batch picks the top b of the inner ranking") {
  const auto l = ledger_from({5.0, 25.0, 15.0, 20.0, 10.0});
  Rng rng(1);
  const auto got = batch_choose(StrategyConfig{"", StrategyKind::greedy, Cap{}}, l, 3, rng);
  CHECK(got == std::vector<TopicId>{1, 3, 2});
  CHECK(batch_choose(StrategyConfig{"", StrategyKind::greedy, Cap{1}}, l, 3, rng).empty());
  CHECK_THROWS_AS(batch_choose(StrategyConfig{}, l, 0, rng), ConfigError);

  // b = 1 matches the single-topic chooser.
  const auto mixed = ledger_from({5.0, std::nullopt, 15.0, std::nullopt, 10.0});
  for (std::uint64_t s = 0; s < 50; ++s) {
    Rng a(s), b(s);
    StrategyConfig eps{"", StrategyKind::epsilon_greedy, Cap{}};
    CHECK(batch_choose(eps, mixed, 1, a).front() == *epsilon_greedy_choose(mixed, Cap{}, 0.7, b));
  }
}

TEST_CASE("batches never repeat a topic") {
  Rng rng(8);
  const SimilarityIndex idx(std::vector<std::vector<Neighbor>>(30));
  for (int trial = 0; trial < 10000; ++trial) {
    const std::size_t n = 2 + rng.uniform_index(29);
    std::vector<std::optional<double>> v(n);
    for (auto& x : v) {
      if (rng.uniform01() < 0.6) x = std::round(rng.uniform01() * 10.0);
    }
    auto l = ledger_from(v);
    StrategyConfig c{"", kAllKinds[trial % 5], Cap{1 + static_cast<std::int64_t>(rng.uniform_index(3))}};
    const std::size_t b = 1 + rng.uniform_index(n);
    std::vector<TopicId> subset(n);
    for (TopicId t = 0; t < n; ++t) subset[t] = t;
    std::vector<std::vector<Neighbor>> empty(n);
    const SimilarityIndex local(empty);
    const auto out = batch_choose(c, l, b, rng, &local, subset);
    CHECK(out.size() <= b);
    const std::set<TopicId> distinct(out.begin(), out.end());
    CHECK(distinct.size() == out.size());
    for (TopicId t : out) CHECK(l.eligible(t, c.cap));
  }
}

TEST_CASE("decisions are invariant to affine rescaling of difficulty") {
  const auto kw = clustered_keywords(20, 4);
  std::vector<TopicMeta> topics(20);
  for (TopicId t = 0; t < 20; ++t) topics[t] = {t, "", kw[t]};
  const SimilarityIndex idx(topics);

  for (StrategyKind kind : kAllKinds) {
    for (std::uint64_t seed = 0; seed < 40; ++seed) {
      StrategyConfig c{"", kind, Cap{4}};
      c.batch = 1 + seed % 3;
      // Contextual scores mix neighbour means, so only exact power-of-two scaling is bit-stable.
      const double a = 2.0;
      const double m = kind == StrategyKind::contextual ? 0.0 : 7.0;
      Rng sub_rng(seed);
      const auto subset = choose_subset(20, 0.5, sub_rng);
      Ledger l1(20), l2(20);
      auto c1 = make_chooser(c, l1, &idx, subset);
      auto c2 = make_chooser(c, l2, &idx, subset);
      Rng r1(seed), r2(seed), data(seed + 1000);
      for (int round = 0; round < 40; ++round) {
        const auto p1 = c1->choose(l1, c.batch, r1);
        const auto p2 = c2->choose(l2, c.batch, r2);
        REQUIRE(p1 == p2);
        if (p1.empty()) break;
        for (TopicId t : p1) {
          const double d = std::round(data.uniform01() * 20.0);
          l1.record({t, d, l1.total_pulls() + 1});
          l2.record({t, a * d + m, l2.total_pulls() + 1});
          c1->observe(l1, t);
          c2->observe(l2, t);
        }
      }
    }
  }
}

TEST_CASE("incremental choosers agree with the reference choosers") {
  Rng src(77);
  for (StrategyKind kind : kAllKinds) {
    for (int trial = 0; trial < 60; ++trial) {
      const std::size_t n = 3 + src.uniform_index(38);
      const auto kw = clustered_keywords(n, 1 + src.uniform_index(6));
      std::vector<TopicMeta> topics(n);
      for (TopicId t = 0; t < n; ++t) topics[t] = {t, "", kw[t]};
      const SimilarityIndex idx(topics);

      StrategyConfig c{"", kind};
      c.cap = src.uniform01() < 0.2 ? Cap{} : Cap{1 + static_cast<std::int64_t>(src.uniform_index(5))};
      c.batch = 1 + src.uniform_index(std::min<std::size_t>(n, 4));
      c.epsilon = src.uniform01();
      c.temperature = 0.5 + src.uniform01();
      Rng sub_rng(src.engine()());
      const auto subset = choose_subset(n, 0.1 + 0.9 * src.uniform01(), sub_rng);

      Ledger ledger(n);
      // A few observations before the chooser is built exercise its initialisation.
      for (int i = 0; i < 3; ++i) {
        ledger.record({static_cast<TopicId>(src.uniform_index(n)), std::round(src.uniform01() * 10.0),
                       ledger.total_pulls() + 1});
      }
      auto inc = make_chooser(c, ledger, &idx, subset);
      const auto seed = src.engine()();
      Rng ref_rng(seed), inc_rng(seed);
      for (int round = 0; round < 300; ++round) {
        const auto want = batch_choose(c, ledger, c.batch, ref_rng, &idx, subset);
        const auto got = inc->choose(ledger, c.batch, inc_rng);
        REQUIRE(got == want);
        if (got.empty()) break;
        for (TopicId t : got) {
          if (src.uniform01() < 0.05) {
            ledger.retire(t);
          } else {
            ledger.record({t, std::round(src.uniform01() * 10.0), ledger.total_pulls() + 1});
          }
          inc->observe(ledger, t);
        }
      }
    }
  }
}
