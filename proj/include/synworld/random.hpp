#pragma once

#include <algorithm>
#include <cstddef>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <vector>

namespace synworld {

/// Engine behind every seeded decision. Its textual state is stored in
/// checkpoints so resumed runs continue the same stream.
using Rng = std::mt19937_64;

/// Uniform integer in [0, n) by rejection sampling; n must be positive.
/// Does not depend on the standard library's distribution implementation.
inline std::size_t draw_below(Rng& rng, std::size_t n) {
  const std::uint64_t bound = static_cast<std::uint64_t>(n);
  const std::uint64_t limit = Rng::max() - (Rng::max() % bound);
  std::uint64_t x;
  do {
    x = rng();
  } while (x >= limit);
  return static_cast<std::size_t>(x % bound);
}

/// `k` distinct indices from [0, n), returned in ascending order. When k >= n
/// all indices are returned and the engine is left untouched.
inline std::vector<std::size_t> sample_indices(Rng& rng, std::size_t n, std::size_t k) {
  std::vector<std::size_t> idx(n);
  for (std::size_t i = 0; i < n; ++i) idx[i] = i;
  if (k >= n) return idx;
  for (std::size_t i = 0; i < k; ++i) {
    std::size_t j = i + draw_below(rng, n - i);
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  return idx;
}

std::string rng_state(const Rng& rng);
void set_rng_state(Rng& rng, const std::string& state);

/// 64-bit FNV-1a; stable across platforms, used to derive per-prompt seeds.
inline std::uint64_t fnv1a(std::string_view text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace synworld
