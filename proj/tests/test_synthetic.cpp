#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <set>

#include "topic_bandit/strategies.hpp"
#include "topic_bandit/synthetic_world.hpp"

using namespace topic_bandit;

namespace {

SyntheticWorldConfig point_mass(double mu, double sigma2) {
  SyntheticWorldConfig c;
  c.n_topics = 1;
  c.clusters = 1;
  c.gmm = GmmParams{{{1.0, mu, 1e-300}}};
  c.sigma2 = sigma2;
  return c;
}

/// Mixture CDF written out independently of GmmParams::cdf.
double mixture_cdf(const GmmParams& g, double x) {
  double s = 0.0;
  for (const auto& c : g.components) s += c.weight * 0.5 * (1.0 + std::erf((x - c.mean) / std::sqrt(2.0 * c.variance)));
  return s;
}

}  // namespace

TEST_CASE("config validation") {
  SyntheticWorldConfig c;
  CHECK_NOTHROW(c.validate());
  c.sigma2 = 0.0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.clamp_lo = 50;
  c.clamp_hi = 50;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = {};
  c.n_topics = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("one cluster per topic without spread gives iid mixture draws") {
  SyntheticWorldConfig c;
  c.n_topics = 500;
  c.clusters = 500;
  Rng a(3);
  const auto means = sample_topic_means(c, a);
  Rng b(3);
  for (double m : means) CHECK(m == c.gmm.sample(b));
}

TEST_CASE("topic means follow the mixture") {
  SyntheticWorldConfig c;
  c.n_topics = 100000;
  c.clusters = c.n_topics;
  Rng rng(19);
  auto means = sample_topic_means(c, rng);
  double s = 0.0;
  for (double m : means) s += m;
  double analytic = 0.0;
  for (const auto& comp : c.gmm.components) analytic += comp.weight * comp.mean;
  CHECK(std::abs(s / static_cast<double>(means.size()) - analytic) < 0.2);

  std::sort(means.begin(), means.end());
  double ks = 0.0;
  const auto n = static_cast<double>(means.size());
  for (std::size_t i = 0; i < means.size(); ++i) {
    const double f = mixture_cdf(c.gmm, means[i]);
    ks = std::max({ks, std::abs(f - static_cast<double>(i) / n), std::abs(static_cast<double>(i + 1) / n - f)});
  }
  CHECK(ks < 0.01);
}

TEST_CASE("cluster keywords") {
  SyntheticWorldConfig c;
  c.n_topics = 20;
  c.clusters = 5;
  c.tokens_shared = 3;
  c.tokens_unique = 2;
  SyntheticWorld w(c, 1);
  const auto& t = w.topics();
  for (std::size_t i = 0; i < t.size(); ++i) {
    CHECK(t[i].keywords.size() == 5);
    CHECK(std::is_sorted(t[i].keywords.begin(), t[i].keywords.end()));
    for (std::size_t j = i + 1; j < t.size(); ++j) {
      std::vector<std::string> shared;
      std::set_intersection(t[i].keywords.begin(), t[i].keywords.end(), t[j].keywords.begin(), t[j].keywords.end(),
                            std::back_inserter(shared));
      if (w.cluster_of(t[i].id) == w.cluster_of(t[j].id)) {
        CHECK(shared.size() == 3);
        CHECK(jaccard(t[i].keywords, t[j].keywords) > 0.0);
        CHECK(w.true_means()->operator[](i) == w.true_means()->operator[](j));
      } else {
        CHECK(shared.empty());
      }
    }
  }
}

TEST_CASE("draws: degenerate variance, moments and clamping") {
  Rng rng(4);
  SyntheticWorld tight(point_mass(37.5, 1e-12), 1);
  for (int i = 0; i < 100; ++i) CHECK(std::abs(tight.draw(0, rng) - 37.5) < 1e-4);

  SyntheticWorld moments(point_mass(25.0, 25.0), 1);
  const int n = 50000;
  double s = 0.0;
  double q = 0.0;
  for (int i = 0; i < n; ++i) {
    const double d = moments.draw(0, rng);
    s += d;
    q += d * d;
  }
  const double mean = s / n;
  const double var = q / n - mean * mean;
  CHECK(std::abs(mean - 25.0) < 0.1);
  CHECK(std::abs(var - 25.0) < 1.0);

  SyntheticWorld negative(point_mass(-10.0, 25.0), 1);
  CHECK(negative.true_means()->front() == doctest::Approx(-10.0));
  for (int i = 0; i < 10000; ++i) {
    const double d = negative.draw(0, rng);
    CHECK(d >= 0.0);
    CHECK(d <= 100.0);
  }
  CHECK_THROWS_AS(negative.draw(1, rng), InvalidTopicError);
}

TEST_CASE("sessions draw from the same distribution") {
  SyntheticWorld w(point_mass(60.0, 1e-12), 1);
  auto session = w.open_session();
  Rng rng(1);
  const TopicId ids[] = {0, 0, 0};
  for (const auto& o : session->draw_batch(ids, rng)) {
    CHECK(o.status == DrawStatus::ok);
    CHECK(std::abs(o.difficulty - 60.0) < 1e-4);
  }
}
