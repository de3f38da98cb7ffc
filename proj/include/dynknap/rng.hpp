#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace dynknap {

using Rng = std::mt19937_64;

// Stable 64-bit FNV-1a, used to derive per-cell seeds from
// (master seed, algorithm name, run index). Must not depend on
// std::hash, whose values vary between standard libraries.
inline std::uint64_t fnv1a64(std::string_view data, std::uint64_t h = 14695981039346656037ull) {
  for (unsigned char c : data) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t fnv1a64(std::uint64_t value, std::uint64_t h = 14695981039346656037ull) {
  for (int i = 0; i < 8; ++i) {
    h ^= (value >> (8 * i)) & 0xffu;
    h *= 1099511628211ull;
  }
  return h;
}

inline std::uint64_t derive_seed(std::uint64_t master, std::string_view tag, std::uint64_t index) {
  return fnv1a64(index, fnv1a64(tag, fnv1a64(master)));
}

}  // namespace dynknap
