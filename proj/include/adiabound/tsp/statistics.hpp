#pragma once

// Exhaustive tour statistics: the brute-force optimum, the population spread
// Sigma_M of all M! tour lengths, its Monte Carlo scaling study, and the
// tour fraction M!/M^M.

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <istream>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "adiabound/errors.hpp"
#include "adiabound/rng.hpp"
#include "adiabound/tsp/encoding.hpp"
#include "adiabound/tsp/instance.hpp"

namespace adiabound::tsp {

inline constexpr std::size_t kMaxEnumerationCities = 11;

/// Relative tolerance under which two tour lengths count as tied. Rotations of
/// one cycle sum the same legs in a different order.
inline constexpr double kTieRelTol = 1e-12;

inline bool lengths_tied(double a, double b) {
  return std::abs(a - b) <= kTieRelTol * std::max({1.0, std::abs(a), std::abs(b)});
}

inline void require_enumerable(std::size_t M, const char* what) {
  if (M > kMaxEnumerationCities) {
    throw BudgetExceeded(std::string(what) + ": M = " + std::to_string(M) +
                         " exceeds the exhaustive-enumeration budget (M <= " +
                         std::to_string(kMaxEnumerationCities) + ")");
  }
}

struct ShortestTour {
  Tour tour;  ///< lowest-rank minimiser
  double length = 0.0;
  std::vector<Rank> argmin_ranks;  ///< every rank tied with the minimum, ascending
};

inline ShortestTour brute_force_shortest(const TspInstance& inst) {
  require_enumerable(inst.size(), "brute_force_shortest");
  double best = std::numeric_limits<double>::infinity();
  std::vector<double> lengths;
  lengths.reserve(factorial(inst.size()));
  for_each_tour(inst.distances(), inst.size(), [&](std::span<const std::size_t>, double len) {
    lengths.push_back(len);
    best = std::min(best, len);
  });
  ShortestTour out;
  out.length = best;
  for (std::size_t i = 0; i < lengths.size(); ++i) {
    if (lengths_tied(lengths[i], best)) out.argmin_ranks.push_back(i + 1);
  }
  out.tour = rank_to_tour(out.argmin_ranks.front(), inst.size());
  out.length = lengths[out.argmin_ranks.front() - 1];
  return out;
}

/// Population standard deviation of all M! closed tour lengths of a raw
/// row-major matrix. Welford accumulation in lexicographic order.
inline double sigma_m(std::span<const double> d, std::size_t M) {
  require_enumerable(M, "sigma_m");
  double mean = 0.0;
  double m2 = 0.0;
  std::uint64_t n = 0;
  for_each_tour(d, M, [&](std::span<const std::size_t>, double len) {
    ++n;
    const double delta = len - mean;
    mean += delta / static_cast<double>(n);
    m2 += delta * (len - mean);
  });
  return std::sqrt(std::max(0.0, m2 / static_cast<double>(n)));
}

inline double sigma_m(const TspInstance& inst) { return sigma_m(inst.distances(), inst.size()); }

/// I.i.d. off-diagonal distance sampler.
struct DistanceSampler {
  enum class Kind { uniform, constant };
  Kind kind = Kind::uniform;
  double low = 0.0;   ///< uniform lower bound, or the constant value
  double high = 1.0;  ///< uniform upper bound (exclusive)

  static DistanceSampler uniform(double low, double high) {
    if (!(low >= 0.0) || !(high > low)) throw InvalidArgument("uniform sampler needs 0 <= low < high");
    return {Kind::uniform, low, high};
  }
  static DistanceSampler constant(double value) {
    if (!(value >= 0.0)) throw InvalidArgument("constant sampler needs a nonnegative value");
    return {Kind::constant, value, value};
  }

  template <typename Gen>
  double operator()(Gen& gen) const {
    if (kind == Kind::constant) return low;
    return std::uniform_real_distribution<double>(low, high)(gen);
  }

  friend bool operator==(const DistanceSampler&, const DistanceSampler&) = default;
};

/// Row-major matrix for instance `index` of size M, keyed by (seed, M, index).
inline std::vector<double> random_distances(std::size_t M, const DistanceSampler& sampler,
                                            std::uint64_t seed, std::uint64_t index) {
  auto gen = make_stream({seed, M, index});
  std::vector<double> d(M * M, 0.0);
  for (std::size_t i = 0; i < M; ++i) {
    for (std::size_t j = 0; j < M; ++j) {
      if (i != j) d[i * M + j] = sampler(gen);
    }
  }
  return d;
}

inline TspInstance random_instance(std::size_t M, const DistanceSampler& sampler, std::uint64_t seed,
                                   std::uint64_t index = 0) {
  return TspInstance(M, random_distances(M, sampler, seed, index));
}

struct SigmaRow {
  std::size_t M = 0;
  std::size_t samples = 0;
  double sigma_mean = 0.0;
  double sigma_stderr = 0.0;
  double ratio_sqrtM = 0.0;

  friend bool operator==(const SigmaRow&, const SigmaRow&) = default;
};

struct SigmaReport {
  std::vector<SigmaRow> rows;
  friend bool operator==(const SigmaReport&, const SigmaReport&) = default;
};

/// For each M in [M_min, M_max], draws `samples` instances and averages their
/// exact Sigma_M. Results do not depend on `threads`.
inline SigmaReport sigma_scaling_study(std::size_t M_min, std::size_t M_max, std::size_t samples,
                                       std::uint64_t seed, const DistanceSampler& sampler,
                                       unsigned threads = 1) {
  if (M_min < 1 || M_max < M_min) throw InvalidArgument("sigma_scaling_study: invalid M range");
  if (samples < 1) throw InvalidArgument("sigma_scaling_study: samples must be >= 1");
  require_enumerable(M_max, "sigma_scaling_study");

  const std::size_t nM = M_max - M_min + 1;
  std::vector<double> sigmas(nM * samples);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t job = next++; job < sigmas.size(); job = next++) {
      const std::size_t M = M_min + job / samples;
      const std::size_t i = job % samples;
      sigmas[job] = sigma_m(random_distances(M, sampler, seed, i), M);
    }
  };
  {
    std::vector<std::jthread> pool;
    for (unsigned t = 1; t < std::max(1u, threads); ++t) pool.emplace_back(worker);
    worker();
  }

  SigmaReport report;
  for (std::size_t k = 0; k < nM; ++k) {
    SigmaRow row;
    row.M = M_min + k;
    row.samples = samples;
    double mean = 0.0;
    for (std::size_t i = 0; i < samples; ++i) mean += sigmas[k * samples + i];
    mean /= static_cast<double>(samples);
    double ss = 0.0;
    for (std::size_t i = 0; i < samples; ++i) {
      const double dv = sigmas[k * samples + i] - mean;
      ss += dv * dv;
    }
    row.sigma_mean = mean;
    row.sigma_stderr = samples > 1 ? std::sqrt(ss / static_cast<double>(samples - 1) /
                                               static_cast<double>(samples))
                                   : 0.0;
    row.ratio_sqrtM = mean / std::sqrt(static_cast<double>(row.M));
    report.rows.push_back(row);
  }
  return report;
}

inline constexpr const char* kSigmaCsvHeader = "M,samples,sigma_mean,sigma_stderr,ratio_sqrtM";

inline std::string to_csv(const SigmaReport& report) {
  auto num = [](double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
  };
  std::string out = std::string(kSigmaCsvHeader) + "\n";
  for (const auto& r : report.rows) {
    out += std::to_string(r.M) + "," + std::to_string(r.samples) + "," + num(r.sigma_mean) + "," +
           num(r.sigma_stderr) + "," + num(r.ratio_sqrtM) + "\n";
  }
  return out;
}

inline SigmaReport sigma_report_from_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kSigmaCsvHeader) {
    throw ParseError(1, "expected SigmaReport header '" + std::string(kSigmaCsvHeader) + "'");
  }
  SigmaReport report;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 5) throw ParseError(lineno, "expected 5 columns");
    auto dbl = [&](const std::string& s) {
      double v = 0.0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size()) throw ParseError(lineno, "bad number '" + s + "'");
      return v;
    };
    SigmaRow r;
    r.M = static_cast<std::size_t>(dbl(cells[0]));
    r.samples = static_cast<std::size_t>(dbl(cells[1]));
    r.sigma_mean = dbl(cells[2]);
    r.sigma_stderr = dbl(cells[3]);
    r.ratio_sqrtM = dbl(cells[4]);
    report.rows.push_back(r);
  }
  return report;
}

struct FractionRow {
  std::size_t M = 0;
  double ratio = 0.0;            ///< M!/M^M
  double stirling = 0.0;         ///< sqrt(2 pi M) e^-M
  double rel_deviation = 0.0;    ///< ratio / stirling - 1
  double quoted_form = 0.0;       ///< e^-M / sqrt(M), an asymptotic form quoted for comparison
  double quoted_deviation = 0.0;  ///< ratio / quoted_form - 1
  double log_decrement = 0.0;    ///< ln ratio(M) - ln ratio(M-1); 0 for the first row
};

/// log(M!/M^M) via lgamma; exact enough that M=1..20 match integer arithmetic to ~1e-15.
inline double log_tour_fraction(std::size_t M) {
  const double m = static_cast<double>(M);
  return std::lgamma(m + 1.0) - m * std::log(m);
}

inline std::vector<FractionRow> tour_fraction_decay(std::size_t M_min, std::size_t M_max) {
  if (M_min < 1 || M_max < M_min) throw InvalidArgument("tour_fraction_decay: invalid M range");
  std::vector<FractionRow> rows;
  for (std::size_t M = M_min; M <= M_max; ++M) {
    const double m = static_cast<double>(M);
    FractionRow r;
    r.M = M;
    const double lr = log_tour_fraction(M);
    r.ratio = std::exp(lr);
    r.stirling = std::sqrt(2.0 * std::numbers::pi * m) * std::exp(-m);
    r.rel_deviation = std::exp(lr - std::log(r.stirling)) - 1.0;
    r.quoted_form = std::exp(-m) / std::sqrt(m);
    r.quoted_deviation = std::exp(lr - std::log(r.quoted_form)) - 1.0;
    r.log_decrement = M > 1 ? lr - log_tour_fraction(M - 1) : 0.0;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace adiabound::tsp
