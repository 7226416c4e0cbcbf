#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

#include <Eigen/Core>

namespace hmgame {

/// splitmix64 finalizer; used to derive independent stream seeds from a
/// base seed so that no two consumers share a generator.
constexpr std::uint64_t mix_seed(std::uint64_t base, std::uint64_t stream) {
  std::uint64_t z = base + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Seeded generator with platform-independent draws (std distributions are
/// implementation-defined, so we map engine output ourselves).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform index in [0, n).
  std::size_t uniform_index(std::size_t n) {
    return static_cast<std::size_t>(uniform() * static_cast<double>(n));
  }

  /// Draws an index from a probability vector. Falls back to the last index
  /// with positive mass when rounding leaves the cumulative sum short of u.
  template <typename Derived>
  std::size_t categorical(const Eigen::DenseBase<Derived>& probabilities) {
    const double u = uniform();
    double cumulative = 0.0;
    Eigen::Index last_positive = 0;
    for (Eigen::Index i = 0; i < probabilities.size(); ++i) {
      const double p = static_cast<double>(probabilities(i));
      if (p <= 0.0) continue;
      last_positive = i;
      cumulative += p;
      if (u < cumulative) return static_cast<std::size_t>(i);
    }
    return static_cast<std::size_t>(last_positive);
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace hmgame
