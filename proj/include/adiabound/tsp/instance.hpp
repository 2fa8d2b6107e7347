#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "adiabound/errors.hpp"
#include "adiabound/tsp/encoding.hpp"

namespace adiabound::tsp {

/// Closed-tour length: sum of consecutive legs plus the return leg.
/// `d` is row-major M x M.
inline double closed_tour_length(std::span<const double> d, std::span<const std::size_t> perm) {
  const std::size_t M = perm.size();
  double length = 0.0;
  for (std::size_t j = 0; j + 1 < M; ++j) length += d[perm[j] * M + perm[j + 1]];
  if (M > 0) length += d[perm[M - 1] * M + perm[0]];
  return length;
}

/// Visits every permutation of {0..M-1} in lexicographic order (rank 1, 2, ...)
/// and calls fn(perm, length).
template <typename Fn>
void for_each_tour(std::span<const double> d, std::size_t M, Fn&& fn) {
  std::vector<std::size_t> perm(M);
  std::iota(perm.begin(), perm.end(), std::size_t{0});
  do {
    fn(std::span<const std::size_t>(perm), closed_tour_length(d, perm));
  } while (std::next_permutation(perm.begin(), perm.end()));
}

/// A travelling-salesman instance: M cities and an oriented distance matrix
/// with vanishing diagonal. `l_max` strictly exceeds every closed tour length.
///
/// l_max is 1.1 times the exact longest tour when M <= 10, otherwise
/// 1.1 * M * max d. An instance whose tours all have length 0 gets l_max = 1.
class TspInstance {
 public:
  static constexpr double kLmaxFactor = 1.1;
  static constexpr std::size_t kExactLmaxCities = 10;

  TspInstance(std::size_t M, std::vector<double> distances) : M_(M), d_(std::move(distances)) {
    if (M_ == 0) throw InvalidArgument("instance needs at least one city");
    if (d_.size() != M_ * M_) {
      throw InvalidArgument("distance matrix has " + std::to_string(d_.size()) +
                            " entries, expected " + std::to_string(M_ * M_));
    }
    for (std::size_t i = 0; i < M_; ++i) {
      for (std::size_t j = 0; j < M_; ++j) {
        const double v = d_[i * M_ + j];
        if (!std::isfinite(v)) {
          throw InvalidArgument("non-finite distance at (" + std::to_string(i) + ", " +
                                std::to_string(j) + ")");
        }
        if (v < 0.0) {
          throw InvalidArgument("negative distance at (" + std::to_string(i) + ", " +
                                std::to_string(j) + ")");
        }
      }
      if (d_[i * M_ + i] != 0.0) throw InvalidArgument("nonzero diagonal at row " + std::to_string(i));
    }
    l_max_exact_ = M_ <= kExactLmaxCities;
    double longest = 0.0;
    if (l_max_exact_) {
      for_each_tour(d_, M_, [&](std::span<const std::size_t>, double len) {
        longest = std::max(longest, len);
      });
    } else {
      longest = static_cast<double>(M_) * max_distance();
    }
    l_max_ = longest > 0.0 ? kLmaxFactor * longest : 1.0;
  }

  std::size_t size() const noexcept { return M_; }
  double distance(std::size_t i, std::size_t j) const { return d_.at(i * M_ + j); }
  std::span<const double> distances() const noexcept { return d_; }
  double l_max() const noexcept { return l_max_; }
  /// True when l_max came from exhaustive enumeration rather than the M * max d bound.
  bool l_max_exact() const noexcept { return l_max_exact_; }

  double max_distance() const { return *std::max_element(d_.begin(), d_.end()); }

  friend bool operator==(const TspInstance& a, const TspInstance& b) {
    return a.M_ == b.M_ && a.d_ == b.d_ && a.l_max_ == b.l_max_;
  }

 private:
  std::size_t M_;
  std::vector<double> d_;
  double l_max_ = 1.0;
  bool l_max_exact_ = true;
};

inline double tour_length(const TspInstance& inst, std::span<const std::size_t> perm) {
  if (perm.size() != inst.size()) {
    throw InvalidArgument("tour has " + std::to_string(perm.size()) + " cities, instance has " +
                          std::to_string(inst.size()));
  }
  if (!is_permutation(perm, inst.size())) throw InvalidArgument("tour is not a permutation");
  return closed_tour_length(inst.distances(), perm);
}

inline double tour_length(const TspInstance& inst, const Tour& t) { return tour_length(inst, t.perm); }

}  // namespace adiabound::tsp
