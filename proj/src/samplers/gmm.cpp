#include "topic_bandit/gmm.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>
#include <numeric>
#include <string>

#include "topic_bandit/errors.hpp"

namespace topic_bandit {

namespace {

constexpr double kMinVariance = 1e-8;

double log_normal_pdf(double x, double mean, double variance) {
  const double d = x - mean;
  return -0.5 * (std::log(2.0 * std::numbers::pi * variance) + d * d / variance);
}

std::uint64_t hash_values(std::span<const double> sorted) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (double v : sorted) {
    std::uint64_t bits;
    std::memcpy(&bits, &v, sizeof bits);
    for (int i = 0; i < 8; ++i) {
      h ^= (bits >> (8 * i)) & 0xffU;
      h *= 0x100000001b3ULL;
    }
  }
  return h;
}

// k-means++ seeding followed by one hard assignment to build initial params.
GmmParams seed_params(std::span<const double> x, std::size_t k, Rng& rng) {
  std::vector<double> centers;
  centers.reserve(k);
  centers.push_back(x[rng.uniform_index(x.size())]);
  std::vector<double> dist2(x.size());
  while (centers.size() < k) {
    double total = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
      double best = std::numeric_limits<double>::infinity();
      for (double c : centers) best = std::min(best, (x[i] - c) * (x[i] - c));
      dist2[i] = best;
      total += best;
    }
    if (total <= 0.0) {
      centers.push_back(x[rng.uniform_index(x.size())]);
      continue;
    }
    double target = rng.uniform01() * total;
    std::size_t pick = x.size() - 1;
    for (std::size_t i = 0; i < x.size(); ++i) {
      target -= dist2[i];
      if (target < 0.0) {
        pick = i;
        break;
      }
    }
    centers.push_back(x[pick]);
  }

  const double n = static_cast<double>(x.size());
  const double overall_mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double overall_var = 0.0;
  for (double v : x) overall_var += (v - overall_mean) * (v - overall_mean);
  overall_var = std::max(overall_var / n, kMinVariance * 10.0);

  std::vector<double> cnt(k, 0.0), sum(k, 0.0), sq(k, 0.0);
  for (double v : x) {
    std::size_t best = 0;
    for (std::size_t j = 1; j < k; ++j) {
      if (std::abs(v - centers[j]) < std::abs(v - centers[best])) best = j;
    }
    cnt[best] += 1.0;
    sum[best] += v;
    sq[best] += v * v;
  }

  GmmParams p;
  for (std::size_t j = 0; j < k; ++j) {
    GmmComponent c;
    if (cnt[j] > 0.0) {
      c.mean = sum[j] / cnt[j];
      c.variance = sq[j] / cnt[j] - c.mean * c.mean;
      c.weight = cnt[j] / n;
    } else {
      c.mean = centers[j];
      c.variance = overall_var;
      c.weight = 1.0 / n;
    }
    if (!(c.variance > kMinVariance)) c.variance = overall_var;
    p.components.push_back(c);
  }
  const double wsum = std::accumulate(p.components.begin(), p.components.end(), 0.0,
                                      [](double a, const GmmComponent& c) { return a + c.weight; });
  for (auto& c : p.components) c.weight /= wsum;
  return p;
}

struct RestartResult {
  GmmParams params;
  std::vector<double> trace;
  bool degenerate = false;
};

RestartResult run_em(std::span<const double> x, GmmParams params, const GmmFitOptions& opt) {
  const std::size_t n = x.size();
  const std::size_t k = params.components.size();
  std::vector<double> resp(n * k);
  std::vector<double> logp(k);
  RestartResult out;

  double prev_ll = -std::numeric_limits<double>::infinity();
  for (int iter = 0; iter < opt.max_iter; ++iter) {
    // E-step.
    double ll = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double mx = -std::numeric_limits<double>::infinity();
      for (std::size_t j = 0; j < k; ++j) {
        const auto& c = params.components[j];
        logp[j] = std::log(c.weight) + log_normal_pdf(x[i], c.mean, c.variance);
        mx = std::max(mx, logp[j]);
      }
      double s = 0.0;
      for (std::size_t j = 0; j < k; ++j) s += std::exp(logp[j] - mx);
      const double lse = mx + std::log(s);
      ll += lse;
      for (std::size_t j = 0; j < k; ++j) resp[i * k + j] = std::exp(logp[j] - lse);
    }
    out.trace.push_back(ll);

    if (iter > 1 && std::abs(ll - prev_ll) <= opt.tol * std::abs(ll)) break;
    prev_ll = ll;

    // M-step.
    for (std::size_t j = 0; j < k; ++j) {
      double nk = 0.0, s = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        nk += resp[i * k + j];
        s += resp[i * k + j] * x[i];
      }
      auto& c = params.components[j];
      if (nk <= 0.0) {
        out.degenerate = true;
        return out;
      }
      c.mean = s / nk;
      double v = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const double d = x[i] - c.mean;
        v += resp[i * k + j] * d * d;
      }
      c.variance = v / nk;
      c.weight = nk / static_cast<double>(n);
      if (!(c.variance >= kMinVariance)) {
        out.degenerate = true;
        return out;
      }
    }
  }
  // Log-likelihood of the final parameters closes the trace.
  const double final_ll = params.log_likelihood(x);
  if (out.trace.empty() || final_ll != out.trace.back()) out.trace.push_back(final_ll);
  out.params = std::move(params);
  return out;
}

}  // namespace

void GmmParams::validate() const {
  if (components.empty()) throw ConfigError("gmm needs at least one component");
  double total = 0.0;
  for (const auto& c : components) {
    if (!(c.weight > 0.0)) throw ConfigError("gmm weights must be positive");
    if (!(c.variance > 0.0)) throw ConfigError("gmm variances must be positive");
    if (!std::isfinite(c.mean)) throw ConfigError("gmm means must be finite");
    total += c.weight;
  }
  if (std::abs(total - 1.0) > 1e-9) {
    throw ConfigError("gmm weights sum to " + std::to_string(total) + ", expected 1");
  }
}

double GmmParams::mixture_mean() const {
  double m = 0.0;
  for (const auto& c : components) m += c.weight * c.mean;
  return m;
}

double GmmParams::pdf(double x) const {
  double p = 0.0;
  for (const auto& c : components) p += c.weight * std::exp(log_normal_pdf(x, c.mean, c.variance));
  return p;
}

double GmmParams::cdf(double x) const {
  double p = 0.0;
  for (const auto& c : components) {
    p += c.weight * 0.5 * std::erfc(-(x - c.mean) / std::sqrt(2.0 * c.variance));
  }
  return p;
}

double GmmParams::log_likelihood(std::span<const double> values) const {
  double ll = 0.0;
  std::vector<double> logp(components.size());
  for (double x : values) {
    double mx = -std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < components.size(); ++j) {
      const auto& c = components[j];
      logp[j] = std::log(c.weight) + log_normal_pdf(x, c.mean, c.variance);
      mx = std::max(mx, logp[j]);
    }
    double s = 0.0;
    for (double lp : logp) s += std::exp(lp - mx);
    ll += mx + std::log(s);
  }
  return ll;
}

double GmmParams::sample(Rng& rng) const {
  double u = rng.uniform01();
  std::size_t pick = components.size() - 1;
  for (std::size_t j = 0; j < components.size(); ++j) {
    u -= components[j].weight;
    if (u < 0.0) {
      pick = j;
      break;
    }
  }
  const auto& c = components[pick];
  return rng.normal(c.mean, std::sqrt(c.variance));
}

GmmParams default_gmm() {
  return GmmParams{{
      {0.6, 8.0, 16.0},
      {0.3, 14.0, 25.0},
      {0.1, 22.0, 36.0},
  }};
}

GmmFit fit_gmm(std::span<const double> values, const GmmFitOptions& options) {
  if (options.n_components < 1) throw ConfigError("n_components must be >= 1");
  if (values.size() < options.n_components) {
    throw FitError("need at least " + std::to_string(options.n_components) + " values, got " +
                   std::to_string(values.size()));
  }
  if (options.n_restarts < 1 || options.max_iter < 1) throw ConfigError("restarts and iterations must be >= 1");
  for (double v : values) {
    if (!std::isfinite(v)) throw FitError("non-finite input value");
  }

  std::vector<double> sorted(values.begin(), values.end());
  std::sort(sorted.begin(), sorted.end());
  Rng rng(hash_values(sorted));

  GmmFit best;
  bool have_best = false;
  for (int r = 0; r < options.n_restarts; ++r) {
    auto result = run_em(sorted, seed_params(sorted, options.n_components, rng), options);
    if (result.degenerate) {
      ++best.degenerate_restarts;
      continue;
    }
    const double ll = result.trace.back();
    if (!have_best || ll > best.log_likelihood) {
      const int degenerate = best.degenerate_restarts;
      best.params = std::move(result.params);
      best.log_likelihood = ll;
      best.iterations = static_cast<int>(result.trace.size());
      best.trace = std::move(result.trace);
      best.degenerate_restarts = degenerate;
      have_best = true;
    }
  }
  if (!have_best) {
    throw FitError("all " + std::to_string(options.n_restarts) + " restarts collapsed a component");
  }
  std::sort(best.params.components.begin(), best.params.components.end(),
            [](const GmmComponent& a, const GmmComponent& b) { return a.mean < b.mean; });
  return best;
}

}  // namespace topic_bandit
