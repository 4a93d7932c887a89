#pragma once

#include <cstdint>
#include <random>
#include <utility>
#include <vector>

namespace tempheno {

using Rng = std::mt19937_64;

/// Uniform double in [0,1) built from the top 53 bits, so draws do not depend
/// on the standard library's distribution implementation.
inline double uniform01(Rng& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

/// splitmix64 finalizer; used to derive independent per-stream seeds.
inline std::uint64_t mix_seed(std::uint64_t master, std::uint64_t stream) {
  std::uint64_t z = master + 0x9e3779b97f4a7c15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Uniform index in [0, bound).
inline std::size_t uniform_index(Rng& rng, std::size_t bound) {
  return static_cast<std::size_t>(uniform01(rng) * static_cast<double>(bound)) % bound;
}

/// Fisher-Yates shuffle driven by uniform_index.
template <typename T>
void shuffle_in_place(std::vector<T>& items, Rng& rng) {
  for (std::size_t i = items.size(); i > 1; --i) {
    std::swap(items[i - 1], items[uniform_index(rng, i)]);
  }
}

}  // namespace tempheno
