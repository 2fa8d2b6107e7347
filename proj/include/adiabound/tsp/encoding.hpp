#pragma once

// Tour encodings: lexicographic permutation rank (1-based) and the
// little-endian mixed-radix tuple index s = 1 + sum_i m_i M^(i-1).

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "adiabound/errors.hpp"

namespace adiabound::tsp {

using Rank = std::uint64_t;
using TupleIndex = std::uint64_t;

/// Largest M for which M! fits in 64 bits.
inline constexpr std::size_t kMaxRankCities = 20;
/// Largest M for which M^M fits in 64 bits.
inline constexpr std::size_t kMaxTupleCities = 15;

/// A closed tour: visiting order `perm` and its lexicographic rank in [1, M!].
struct Tour {
  std::vector<std::size_t> perm;
  Rank rank = 1;

  friend bool operator==(const Tour&, const Tour&) = default;
};

inline std::uint64_t factorial(std::size_t n) {
  if (n > kMaxRankCities) {
    throw BudgetExceeded(std::to_string(n) + "! overflows 64 bits (max " +
                         std::to_string(kMaxRankCities) + ")");
  }
  std::uint64_t f = 1;
  for (std::size_t i = 2; i <= n; ++i) f *= i;
  return f;
}

/// M^M, exact.
inline std::uint64_t tuple_count(std::size_t M) {
  if (M == 0 || M > kMaxTupleCities) {
    throw BudgetExceeded("M^M unsupported for M = " + std::to_string(M) +
                         " (1 <= M <= " + std::to_string(kMaxTupleCities) + ")");
  }
  std::uint64_t p = 1;
  for (std::size_t i = 0; i < M; ++i) p *= M;
  return p;
}

inline bool is_permutation(std::span<const std::size_t> perm, std::size_t M) {
  if (perm.size() != M) return false;
  std::vector<bool> seen(M, false);
  for (std::size_t c : perm) {
    if (c >= M || seen[c]) return false;
    seen[c] = true;
  }
  return true;
}

/// True when every entry is distinct, i.e. the tuple reads as a tour.
inline bool is_tour(std::span<const std::size_t> tuple) {
  return is_permutation(tuple, tuple.size());
}

inline Tour rank_to_tour(Rank k, std::size_t M) {
  if (M == 0) throw InvalidArgument("rank_to_tour: M must be positive");
  const std::uint64_t count = factorial(M);
  if (k < 1 || k > count) {
    throw InvalidArgument("rank " + std::to_string(k) + " outside [1, " +
                          std::to_string(count) + "]");
  }
  std::vector<std::size_t> pool(M);
  for (std::size_t i = 0; i < M; ++i) pool[i] = i;

  Tour t;
  t.rank = k;
  t.perm.reserve(M);
  std::uint64_t rest = k - 1;
  for (std::size_t i = 0; i < M; ++i) {
    const std::uint64_t block = factorial(M - 1 - i);
    const auto digit = static_cast<std::size_t>(rest / block);
    rest %= block;
    t.perm.push_back(pool[digit]);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(digit));
  }
  return t;
}

inline Rank tour_to_rank(std::span<const std::size_t> perm) {
  const std::size_t M = perm.size();
  if (M > kMaxRankCities) throw BudgetExceeded("tour_to_rank: M > 20");
  if (!is_permutation(perm, M)) throw InvalidArgument("tour_to_rank: not a permutation");
  Rank rank = 1;
  std::vector<bool> used(M, false);
  for (std::size_t i = 0; i < M; ++i) {
    std::uint64_t smaller = 0;
    for (std::size_t c = 0; c < perm[i]; ++c) smaller += used[c] ? 0 : 1;
    rank += smaller * factorial(M - 1 - i);
    used[perm[i]] = true;
  }
  return rank;
}

inline Tour make_tour(std::vector<std::size_t> perm) {
  const Rank r = tour_to_rank(perm);
  return Tour{std::move(perm), r};
}

inline TupleIndex tuple_to_index(std::span<const std::size_t> m, std::size_t M) {
  if (m.size() != M) {
    throw InvalidArgument("tuple length " + std::to_string(m.size()) + " != M = " +
                          std::to_string(M));
  }
  tuple_count(M);  // range check on M
  TupleIndex s = 0;
  for (std::size_t i = M; i-- > 0;) {
    if (m[i] >= M) {
      throw InvalidArgument("tuple component " + std::to_string(i) + " = " +
                            std::to_string(m[i]) + " outside [0, " + std::to_string(M - 1) + "]");
    }
    s = s * M + m[i];
  }
  return s + 1;
}

inline std::vector<std::size_t> index_to_tuple(TupleIndex s, std::size_t M) {
  const std::uint64_t count = tuple_count(M);
  if (s < 1 || s > count) {
    throw InvalidArgument("tuple index " + std::to_string(s) + " outside [1, " +
                          std::to_string(count) + "]");
  }
  std::vector<std::size_t> m(M);
  std::uint64_t rest = s - 1;
  for (std::size_t i = 0; i < M; ++i) {
    m[i] = static_cast<std::size_t>(rest % M);
    rest /= M;
  }
  return m;
}

}  // namespace adiabound::tsp
