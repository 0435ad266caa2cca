#pragma once
// Seed derivation and sampling helpers. Every randomized component takes an
// explicit seed so that identical seeds give identical results on one build.

#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace kgalign {

using Rng = std::mt19937_64;

// splitmix64 step; used to derive independent per-component seeds from one
// pipeline seed without correlated streams.
inline uint64_t derive_seed(uint64_t base, uint64_t tag) {
  uint64_t z = base + 0x9e3779b97f4a7c15ULL * (tag + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// k distinct values from [0, n) in draw order (partial Fisher-Yates).
inline std::vector<int> sample_without_replacement(int n, int k, Rng& rng) {
  std::vector<int> idx(n);
  std::iota(idx.begin(), idx.end(), 0);
  if (k > n) k = n;
  for (int i = 0; i < k; ++i) {
    std::uniform_int_distribution<int> d(i, n - 1);
    std::swap(idx[i], idx[d(rng)]);
  }
  idx.resize(k);
  return idx;
}

}  // namespace kgalign
