#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>

namespace adiabound {

/// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

/// Derives an independent stream seed from a tuple of counters, so that a
/// value keyed by (seed, i, j, ...) does not depend on evaluation order.
inline std::uint64_t stream_seed(std::initializer_list<std::uint64_t> keys) noexcept {
  std::uint64_t h = 0x6a09e667f3bcc909ULL;
  for (std::uint64_t k : keys) h = mix64(h ^ mix64(k));
  return h;
}

inline std::mt19937_64 make_stream(std::initializer_list<std::uint64_t> keys) {
  return std::mt19937_64(stream_seed(keys));
}

}  // namespace adiabound
