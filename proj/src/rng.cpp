#include "apirank/rng.hpp"

namespace apirank {

std::uint64_t substream_seed(std::uint64_t root, std::string_view name) {
  // FNV-1a over the stream name, then one splitmix round against the root.
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : name) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  SplitMix64 mixer(root ^ h);
  return mixer.next();
}

std::vector<int> seeded_permutation(std::size_t n, std::uint64_t seed) {
  std::vector<int> perm(n);
  for (std::size_t i = 0; i < n; ++i) perm[i] = static_cast<int>(i);
  SplitMix64 rng(seed);
  seeded_shuffle(perm, rng);
  return perm;
}

}  // namespace apirank
