#pragma once

// Effective lengths over the M^M tuple encoding. Tuples that are tours get
// their closed tour length; all others are pushed above l_max by d^2 + l_max.

#include <cstdint>
#include <random>
#include <string>
#include <vector>

#include "adiabound/errors.hpp"
#include "adiabound/rng.hpp"
#include "adiabound/tsp/encoding.hpp"
#include "adiabound/tsp/instance.hpp"

namespace adiabound::tsp {

/// How d^2 is chosen for non-tour tuples.
///  - parity: d^2 = (1 - (-1)^s) l_max, i.e. 0 for even s and 2 l_max for odd s.
///  - random: d ~ Normal(0, sigma_d), keyed deterministically by (seed, s).
struct DsqPolicy {
  enum class Kind { parity, random };

  Kind kind = Kind::parity;
  double sigma_d = 1.0;
  std::uint64_t seed = 0;

  static DsqPolicy parity() { return {}; }
  static DsqPolicy random(double sigma_d, std::uint64_t seed) {
    if (!(sigma_d > 0.0)) throw InvalidArgument("sigma_d must be positive");
    return {Kind::random, sigma_d, seed};
  }

  double d_squared(TupleIndex s, double l_max) const {
    if (kind == Kind::parity) return (s % 2 == 1) ? 2.0 * l_max : 0.0;
    auto gen = make_stream({seed, s});
    std::normal_distribution<double> normal(0.0, sigma_d);
    const double d = normal(gen);
    return d * d;
  }

  friend bool operator==(const DsqPolicy&, const DsqPolicy&) = default;
};

inline const char* to_string(DsqPolicy::Kind k) {
  return k == DsqPolicy::Kind::parity ? "parity" : "random";
}

inline double effective_length(const TspInstance& inst, TupleIndex s, const DsqPolicy& policy) {
  const std::size_t M = inst.size();
  const auto tuple = index_to_tuple(s, M);
  if (is_tour(tuple)) return closed_tour_length(inst.distances(), tuple);
  return policy.d_squared(s, inst.l_max()) + inst.l_max();
}

/// Effective lengths for every s in [1, M^M]; element s-1 holds s.
inline std::vector<double> effective_lengths(const TspInstance& inst, const DsqPolicy& policy) {
  const std::size_t M = inst.size();
  const std::uint64_t count = tuple_count(M);
  std::vector<double> out;
  out.reserve(count);
  std::vector<std::size_t> tuple(M, 0);
  for (TupleIndex s = 1; s <= count; ++s) {
    if (is_tour(tuple)) {
      out.push_back(closed_tour_length(inst.distances(), tuple));
    } else {
      out.push_back(policy.d_squared(s, inst.l_max()) + inst.l_max());
    }
    for (std::size_t i = 0; i < M; ++i) {  // odometer, lowest digit first
      if (++tuple[i] < M) break;
      tuple[i] = 0;
    }
  }
  return out;
}

}  // namespace adiabound::tsp
