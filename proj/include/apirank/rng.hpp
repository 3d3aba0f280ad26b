#pragma once

#include <cstdint>
#include <string_view>
#include <utility>
#include <vector>

namespace apirank {

/// Deterministic 64-bit generator (splitmix64). Used instead of the standard
/// engines so that shuffles and draws are bit-identical across platforms and
/// standard-library builds.
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  /// Uniform draw in [0, bound), bound > 0. Rejection sampling, no modulo bias.
  std::uint64_t below(std::uint64_t bound) {
    const std::uint64_t limit = bound * (UINT64_MAX / bound);
    std::uint64_t r = next();
    while (r >= limit) r = next();
    return r % bound;
  }

 private:
  std::uint64_t state_;
};

/// Derives an independent seed for a named substream of the root seed, so
/// folds, tie-breaking, and negative sampling each consume their own stream.
std::uint64_t substream_seed(std::uint64_t root, std::string_view name);

/// In-place Fisher-Yates shuffle driven by an explicit generator.
template <typename T>
void seeded_shuffle(std::vector<T>& items, SplitMix64& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng.below(i));
    std::swap(items[i - 1], items[j]);
  }
}

/// Seeded permutation of 0..n-1.
std::vector<int> seeded_permutation(std::size_t n, std::uint64_t seed);

}  // namespace apirank
