#include <algorithm>
#include <cmath>
#include <functional>

#include "topic_bandit/evaluation.hpp"
#include "topic_bandit/synthetic_world.hpp"

#include "../core/parallel.hpp"

namespace topic_bandit {

namespace {

double topk_mean(std::vector<double>& values, int k) {
  const auto kth = values.begin() + (k - 1);
  std::nth_element(values.begin(), kth, values.end(), std::greater<>());
  double s = 0.0;
  for (auto it = values.begin(); it <= kth; ++it) s += *it;
  return s / k;
}

}  // namespace

ScalingCurve scaling_study(const ScalingSpec& spec) {
  spec.gmm.validate();
  if (spec.k < 1) throw ConfigError("k must be >= 1");
  if (spec.sizes.empty()) throw ConfigError("scaling study needs at least one size");
  ScalingCurve curve;
  curve.k = spec.k;

  std::vector<std::size_t> sizes = spec.sizes;
  std::sort(sizes.begin(), sizes.end());
  sizes.erase(std::unique(sizes.begin(), sizes.end()), sizes.end());

  for (std::size_t n : sizes) {
    if (n < static_cast<std::size_t>(spec.k)) {
      throw ConfigError("size " + std::to_string(n) + " is smaller than k = " + std::to_string(spec.k));
    }
    const std::size_t reps = spec.reps > 0 ? spec.reps : (n <= 100'000 ? 100 : 20);
    std::vector<double> values(reps);

    SyntheticWorldConfig cfg;
    cfg.gmm = spec.gmm;
    cfg.n_topics = n;
    cfg.clusters = n;
    cfg.cluster_mu_spread = 0.0;

    detail::parallel_for(reps, spec.workers, [&](std::size_t rep) {
      Rng rng(derive_seed(spec.seed, "scaling/" + std::to_string(n), rep));
      auto means = sample_topic_means(cfg, rng);
      values[rep] = topk_mean(means, spec.k);
    });

    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= static_cast<double>(reps);
    double var = 0.0;
    for (double v : values) var += (v - mean) * (v - mean);
    const double sd = reps > 1 ? std::sqrt(var / static_cast<double>(reps - 1)) : 0.0;
    curve.points.push_back({n, mean, 1.96 * sd / std::sqrt(static_cast<double>(reps)), reps});
  }
  return curve;
}

}  // namespace topic_bandit
