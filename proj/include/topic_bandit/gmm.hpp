#pragma once

#include <span>
#include <vector>

#include "topic_bandit/errors.hpp"
#include "topic_bandit/rng.hpp"

namespace topic_bandit {

struct GmmComponent {
  double weight = 1.0;
  double mean = 0.0;
  /// In squared difficulty units.
  double variance = 1.0;
};

/// One-dimensional Gaussian mixture.
struct GmmParams {
  std::vector<GmmComponent> components;

  /// Weights positive and summing to one within 1e-9; variances positive.
  void validate() const;

  double mixture_mean() const;
  double pdf(double x) const;
  double cdf(double x) const;
  double log_likelihood(std::span<const double> values) const;
  double sample(Rng& rng) const;
};

/// Shipped default mixture: a low-difficulty bulk, a middle shoulder and a
/// thin hard tail. Illustrative, not fitted to any dataset.
GmmParams default_gmm();

struct GmmFitOptions {
  std::size_t n_components = 3;
  /// Relative log-likelihood change that ends a restart.
  double tol = 1e-7;
  int max_iter = 500;
  int n_restarts = 20;
};

struct GmmFit {
  /// Components sorted by ascending mean.
  GmmParams params;
  double log_likelihood = 0.0;
  /// Log-likelihood after every EM iteration of the winning restart.
  std::vector<double> trace;
  int iterations = 0;
  int degenerate_restarts = 0;
};

/// Expectation-maximisation fit with k-means++ seeding. Restarts are seeded
/// from a hash of the sorted data, so the result does not depend on input
/// order. Throws FitError when every restart collapses a component.
GmmFit fit_gmm(std::span<const double> values, const GmmFitOptions& options = {});

}  // namespace topic_bandit
