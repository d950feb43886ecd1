#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace topic_bandit {

/// Seeded random stream. Every run owns its streams; nothing is shared.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform integer in [0, n). Returns 0 without consuming the stream when n == 1.
  std::size_t uniform_index(std::size_t n);
  /// Uniform real in [0, 1).
  double uniform01();
  double normal(double mean, double stddev);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

/// Mixes a master seed, a label and an index into an independent stream seed.
std::uint64_t derive_seed(std::uint64_t master, std::string_view label, std::uint64_t index = 0);

}  // namespace topic_bandit
