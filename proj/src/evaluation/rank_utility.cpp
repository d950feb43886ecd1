#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "topic_bandit/bandit.hpp"
#include "topic_bandit/evaluation.hpp"

namespace topic_bandit {

namespace {

std::string model_of(const std::string& dimension) {
  const auto slash = dimension.rfind('/');
  return slash == std::string::npos ? dimension : dimension.substr(slash + 1);
}

double mean_over(const std::vector<double>& scores, std::span<const std::size_t> subset) {
  double s = 0.0;
  for (std::size_t r : subset) s += scores[r];
  return s / static_cast<double>(subset.size());
}

/// Model indices ordered by mean score, best first, ties by index.
std::vector<std::size_t> rank_models(const std::vector<double>& means) {
  std::vector<std::size_t> order(means.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return means[a] > means[b]; });
  return order;
}

/// Topics by empirical mean from an epsilon-greedy search, best first.
/// Unsampled topics follow in id order.
std::vector<TopicId> searched_topic_order(const ReplayWorld& dataset, const RankUtilitySpec& spec,
                                          std::uint64_t seed) {
  const std::size_t n = dataset.size();
  const std::int64_t budget = spec.search_budget > 0 ? spec.search_budget : static_cast<std::int64_t>(2 * n);
  const auto run = run_bandit(dataset, spec.search, BudgetConfig{budget, 1, budget}, seed);

  std::vector<double> sum(n, 0.0);
  std::vector<std::int64_t> count(n, 0);
  for (const auto& obs : run.pull_log) {
    sum[obs.topic_id] += obs.difficulty;
    ++count[obs.topic_id];
  }
  std::vector<TopicId> sampled;
  std::vector<TopicId> unsampled;
  for (TopicId t = 0; t < n; ++t) (count[t] > 0 ? sampled : unsampled).push_back(t);
  std::stable_sort(sampled.begin(), sampled.end(), [&](TopicId a, TopicId b) {
    return sum[a] / static_cast<double>(count[a]) > sum[b] / static_cast<double>(count[b]);
  });
  sampled.insert(sampled.end(), unsampled.begin(), unsampled.end());
  return sampled;
}

std::vector<std::size_t> difficult_subset(const ReplayWorld& dataset, const RankUtilitySpec& spec,
                                          std::size_t size, std::uint64_t seed) {
  std::vector<std::size_t> out;
  for (TopicId t : searched_topic_order(dataset, spec, seed)) {
    for (std::size_t r : dataset.topic_records(t)) {
      if (out.size() == size) return out;
      out.push_back(r);
    }
  }
  return out;
}

std::vector<std::size_t> high_variance_subset(const ModelScores& ms, std::size_t size) {
  const std::size_t n = ms.scores.front().size();
  const auto m = static_cast<double>(ms.models.size());
  std::vector<double> variance(n, 0.0);
  for (std::size_t r = 0; r < n; ++r) {
    double mean = 0.0;
    for (const auto& s : ms.scores) mean += s[r];
    mean /= m;
    for (const auto& s : ms.scores) variance[r] += (s[r] - mean) * (s[r] - mean);
    variance[r] /= m;
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return variance[a] > variance[b]; });
  order.resize(size);
  return order;
}

std::vector<std::size_t> random_subset(std::size_t n, std::size_t size, Rng& rng) {
  std::vector<std::size_t> pool(n);
  std::iota(pool.begin(), pool.end(), std::size_t{0});
  // Partial Fisher-Yates.
  for (std::size_t i = 0; i < size; ++i) std::swap(pool[i], pool[i + rng.uniform_index(n - i)]);
  pool.resize(size);
  return pool;
}

struct SubsetMetrics {
  double power = 0.0;
  double avg_difficulty = 0.0;
  double avg_adjacent_gap = 0.0;
  double rank_similarity = 0.0;
};

SubsetMetrics measure(const ReplayWorld& dataset, const ModelScores& ms, const std::vector<double>& full_means,
                      const std::vector<std::size_t>& full_order, std::span<const std::size_t> subset,
                      const RankUtilitySpec& spec, Rng& rng) {
  SubsetMetrics out;
  for (std::size_t r : subset) out.avg_difficulty += dataset.records()[r].difficulty;
  out.avg_difficulty /= static_cast<double>(subset.size());

  std::vector<double> sub_means;
  for (const auto& s : ms.scores) sub_means.push_back(mean_over(s, subset));

  std::vector<double> a(subset.size());
  std::vector<double> b(subset.size());
  std::size_t separated = 0;
  const std::size_t pairs = full_order.size() - 1;
  for (std::size_t i = 0; i < pairs; ++i) {
    const auto& sa = ms.scores[full_order[i]];
    const auto& sb = ms.scores[full_order[i + 1]];
    for (std::size_t j = 0; j < subset.size(); ++j) {
      a[j] = sa[subset[j]];
      b[j] = sb[subset[j]];
    }
    if (paired_permutation_pvalue(a, b, spec.permutations, rng) < spec.alpha) ++separated;
    out.avg_adjacent_gap += std::abs(sub_means[full_order[i]] - sub_means[full_order[i + 1]]);
  }
  out.power = static_cast<double>(separated) / static_cast<double>(pairs);
  out.avg_adjacent_gap /= static_cast<double>(pairs);
  out.rank_similarity = kendall_tau(sub_means, full_means);
  return out;
}

}  // namespace

const char* to_string(SubsetStrategy s) {
  switch (s) {
    case SubsetStrategy::random:
      return "random";
    case SubsetStrategy::difficult:
      return "difficult";
    case SubsetStrategy::high_variance:
      return "high_variance";
  }
  return "unknown";
}

SubsetStrategy parse_subset_strategy(std::string_view text) {
  if (text == "random") return SubsetStrategy::random;
  if (text == "difficult") return SubsetStrategy::difficult;
  if (text == "high_variance") return SubsetStrategy::high_variance;
  throw ConfigError("unknown subset strategy '" + std::string(text) + "'");
}

ModelScores model_scores(const ReplayWorld& dataset) {
  std::map<std::string, std::vector<std::string>> dims_by_model;
  for (const auto& d : dataset.dimensions()) dims_by_model[model_of(d)].push_back(d);

  ModelScores out;
  const auto& records = dataset.records();
  for (const auto& [model, dims] : dims_by_model) {
    out.models.push_back(model);
    auto& col = out.scores.emplace_back(records.size(), 0.0);
    for (std::size_t r = 0; r < records.size(); ++r) {
      double s = 0.0;
      int seen = 0;
      for (const auto& d : dims) {
        if (auto it = records[r].qe.find(d); it != records[r].qe.end()) {
          s += it->second;
          ++seen;
        }
      }
      if (seen == 0) {
        throw ConfigError("record " + std::to_string(records[r].sample_id) + " has no score for model " + model);
      }
      col[r] = s / seen;
    }
  }
  return out;
}

double paired_permutation_pvalue(std::span<const double> a, std::span<const double> b, std::size_t permutations,
                                 Rng& rng) {
  if (a.size() != b.size()) throw ConfigError("paired samples differ in length");
  if (a.empty()) throw ConfigError("paired samples are empty");
  std::vector<double> d(a.size());
  double observed = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    d[i] = a[i] - b[i];
    observed += d[i];
  }
  observed = std::abs(observed);
  // Relative slack so permutations equal to the observed statistic up to
  // summation order still count as extreme.
  const double slack = 1e-12 * std::max(1.0, observed);

  std::size_t extreme = 0;
  for (std::size_t p = 0; p < permutations; ++p) {
    double s = 0.0;
    std::uint64_t bits = 0;
    for (std::size_t i = 0; i < d.size(); ++i) {
      if (i % 64 == 0) bits = rng.engine()();
      s += (bits & 1U) ? d[i] : -d[i];
      bits >>= 1U;
    }
    if (std::abs(s) >= observed - slack) ++extreme;
  }
  return static_cast<double>(1 + extreme) / static_cast<double>(1 + permutations);
}

double kendall_tau(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) throw ConfigError("kendall_tau needs equal-length inputs");
  std::int64_t concordant = 0;
  std::int64_t discordant = 0;
  std::int64_t ties_x = 0;
  std::int64_t ties_y = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    for (std::size_t j = i + 1; j < x.size(); ++j) {
      const double dx = x[i] - x[j];
      const double dy = y[i] - y[j];
      if (dx == 0.0 && dy == 0.0) continue;
      if (dx == 0.0) {
        ++ties_x;
      } else if (dy == 0.0) {
        ++ties_y;
      } else if ((dx > 0) == (dy > 0)) {
        ++concordant;
      } else {
        ++discordant;
      }
    }
  }
  const auto n0 = static_cast<double>(concordant + discordant);
  const double denom = std::sqrt((n0 + static_cast<double>(ties_y)) * (n0 + static_cast<double>(ties_x)));
  // Undefined when either side is constant; report agreement only if both are.
  if (denom == 0.0) return ties_x == 0 && ties_y == 0 ? 1.0 : 0.0;
  return static_cast<double>(concordant - discordant) / denom;
}

RankUtilityReport rank_utility(const ReplayWorld& dataset, const RankUtilitySpec& spec) {
  if (spec.sizes.empty()) throw ConfigError("rank utility needs at least one subset size");
  if (spec.reps < 1) throw ConfigError("rank utility reps must be >= 1");
  if (spec.permutations < 1) throw ConfigError("permutations must be >= 1");
  if (!(spec.alpha > 0.0 && spec.alpha < 1.0)) throw ConfigError("alpha must lie in (0, 1)");
  const std::size_t n = dataset.records().size();
  for (std::size_t s : spec.sizes) {
    if (s < 1 || s > n) {
      throw ConfigError("subset size " + std::to_string(s) + " outside [1, " + std::to_string(n) + "]");
    }
  }

  const auto ms = model_scores(dataset);
  if (ms.models.size() < 2) throw ConfigError("rank utility needs scores for at least two models");

  std::vector<std::size_t> all(n);
  std::iota(all.begin(), all.end(), std::size_t{0});
  std::vector<double> full_means;
  for (const auto& s : ms.scores) full_means.push_back(mean_over(s, all));
  const auto full_order = rank_models(full_means);

  RankUtilityReport report;
  report.strategy = spec.strategy;
  report.models = ms.models;

  // High-variance subsets do not depend on the stream, so one draw suffices.
  const std::size_t reps = spec.strategy == SubsetStrategy::high_variance ? 1 : spec.reps;
  for (std::size_t size : spec.sizes) {
    RankUtilityRow row;
    row.size = size;
    for (std::size_t rep = 0; rep < reps; ++rep) {
      const std::string label = "rank_utility/" + std::to_string(size);
      Rng rng(derive_seed(spec.seed, label, rep));
      std::vector<std::size_t> subset;
      switch (spec.strategy) {
        case SubsetStrategy::random:
          subset = random_subset(n, size, rng);
          break;
        case SubsetStrategy::difficult:
          subset = difficult_subset(dataset, spec, size, derive_seed(spec.seed, "rank_utility/search", rep));
          break;
        case SubsetStrategy::high_variance:
          subset = high_variance_subset(ms, size);
          break;
      }
      const auto m = measure(dataset, ms, full_means, full_order, subset, spec, rng);
      row.power += m.power;
      row.avg_difficulty += m.avg_difficulty;
      row.avg_adjacent_gap += m.avg_adjacent_gap;
      row.rank_similarity += m.rank_similarity;
    }
    const auto r = static_cast<double>(reps);
    row.power /= r;
    row.avg_difficulty /= r;
    row.avg_adjacent_gap /= r;
    row.rank_similarity /= r;
    report.rows.push_back(row);
  }
  return report;
}

}  // namespace topic_bandit
