#pragma once

// Builders for the (H_I, H_P, g_I) triples under study. Every H_I has ground
// energy 0 with g_I as (approximate, for truncated Fock spaces) ground state.
//
//   grover      H_I = 1 - |u><u|, H_P = 1 - |m><m|, u uniform over N items
//   tsp-rank    H_I = (a^dag - conj a)(a - a) single mode, H_P diagonal:
//               <n|H_P|n> = length of tour rank n+1 for n < M!, l_max above
//   tsp-tuple   H_I = sum over M modes, H_P diagonal in |m_1..m_M>:
//               effective length when every m_i < M, l_max otherwise
//   tsp-finite  M modes of dimension M, H_I = 1 - |u><u| with u the product of
//               per-mode uniform states, H_P = diag(effective lengths)

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "adiabound/bounds/bounds.hpp"
#include "adiabound/errors.hpp"
#include "adiabound/evolution/schedule.hpp"
#include "adiabound/hilbert/coherent.hpp"
#include "adiabound/hilbert/eigensolver.hpp"
#include "adiabound/hilbert/hamiltonian.hpp"
#include "adiabound/hilbert/state.hpp"
#include "adiabound/tsp/effective_length.hpp"
#include "adiabound/tsp/encoding.hpp"
#include "adiabound/tsp/instance.hpp"
#include "adiabound/tsp/statistics.hpp"

namespace adiabound::models {

using hilbert::Complex;
using hilbert::HamiltonianOp;
using hilbert::StateVector;

inline constexpr std::size_t kMaxGroverItems = std::size_t{1} << 20;
inline constexpr std::size_t kMaxRankCities = 6;
inline constexpr std::size_t kMaxTupleCities = 4;
inline constexpr std::size_t kMaxTupleDim = std::size_t{1} << 22;
inline constexpr std::size_t kMaxFiniteCities = 6;

/// Ground space of H_P: basis indices tied at the minimum, and that minimum.
struct Target {
  std::vector<std::size_t> indices;
  double energy = 0.0;
  bool degenerate() const noexcept { return indices.size() > 1; }
};

struct EnergyBudget {
  double alpha_cost = 0.0;  ///< sum_i |alpha_i|^2
  double initial_norm_bound = 0.0;
  double problem_norm_bound = 0.0;

  /// Bound on ||f H_I + g H_P|| along a schedule.
  double path_bound(const evolution::Schedule& s) const {
    return s.max_f() * initial_norm_bound + s.max_g() * problem_norm_bound;
  }
};

struct ModelBundle {
  std::string name;
  HamiltonianOp H_I;
  HamiltonianOp H_P;
  StateVector g_I;
  Target target;
  EnergyBudget energy_budget;
  /// Basis index -> problem solution (item index, or tour visiting order), if any.
  std::function<std::optional<std::vector<std::size_t>>(std::size_t)> decode;
  /// Closed-form energy spread when one is known (Grover).
  std::optional<double> closed_form_delta_ie;
  /// Coherent-state truncation: total Poisson tail mass discarded.
  double truncation_tail = 0.0;
};

namespace detail {

inline Target diagonal_target(const HamiltonianOp& H_P) {
  const auto gs = hilbert::ground_state(H_P);
  return {gs.argmin_set.empty() ? std::vector<std::size_t>{0} : gs.argmin_set, gs.energy};
}

inline void fill_budget(ModelBundle& b) {
  b.energy_budget.initial_norm_bound = hilbert::norm_bound(b.H_I);
  b.energy_budget.problem_norm_bound = hilbert::norm_bound(b.H_P);
}

}  // namespace detail

inline ModelBundle build_grover(std::size_t N, std::size_t marked) {
  if (N < 2 || N > kMaxGroverItems) throw InvalidArgument("build_grover: N must be in [2, 2^20]");
  if (marked >= N) throw InvalidArgument("build_grover: marked item out of range");
  const auto basis = hilbert::BasisSpec::flat(N);
  StateVector g_I = hilbert::uniform_state(basis);
  ModelBundle b{"grover",
                hilbert::ProjectorComplement(g_I),
                hilbert::ProjectorComplement(hilbert::basis_state(basis, marked)),
                g_I,
                Target{{marked}, 0.0},
                {},
                [N](std::size_t i) -> std::optional<std::vector<std::size_t>> {
                  if (i >= N) return std::nullopt;
                  return std::vector<std::size_t>{i};
                },
                std::sqrt(static_cast<double>(N) - 1.0) / static_cast<double>(N),
                0.0};
  detail::fill_budget(b);
  return b;
}

/// Rank encoding. alpha defaults to sqrt(M!) (times alpha_scale); n_max to
/// the coherent-state default for that alpha.
inline ModelBundle build_tsp_rank(const tsp::TspInstance& inst, std::optional<Complex> alpha = std::nullopt,
                                  std::optional<std::size_t> n_max = std::nullopt,
                                  double tail_tol = hilbert::kDefaultTailTol) {
  const std::size_t M = inst.size();
  if (M < 2 || M > kMaxRankCities) {
    throw BudgetExceeded("build_tsp_rank: M = " + std::to_string(M) + " outside [2, " +
                         std::to_string(kMaxRankCities) + "]");
  }
  const std::uint64_t tours = tsp::factorial(M);
  const Complex a = alpha.value_or(Complex(std::sqrt(static_cast<double>(tours)), 0.0));
  const std::size_t nm = n_max.value_or(hilbert::default_n_max(a));
  if (nm + 1 < tours) {
    throw InvalidArgument("build_tsp_rank: n_max = " + std::to_string(nm) + " cuts off tours (need n_max >= " +
                          std::to_string(tours - 1) + ")");
  }
  const auto coherent = hilbert::coherent_state(a, nm, tail_tol);

  Eigen::VectorXd diag = Eigen::VectorXd::Constant(static_cast<Eigen::Index>(nm + 1), inst.l_max());
  Eigen::Index n = 0;
  tsp::for_each_tour(inst.distances(), M, [&](std::span<const std::size_t>, double len) { diag[n++] = len; });

  const auto basis = hilbert::BasisSpec::fock(nm);
  ModelBundle b{"tsp-rank",
                hilbert::CoherentQuadratic{a, nm},
                hilbert::Diagonal(basis, std::move(diag)),
                coherent.state,
                {},
                {},
                [M, tours](std::size_t i) -> std::optional<std::vector<std::size_t>> {
                  if (i >= tours) return std::nullopt;
                  return tsp::rank_to_tour(i + 1, M).perm;
                },
                std::nullopt,
                coherent.tail_mass};
  b.target = detail::diagonal_target(b.H_P);
  detail::fill_budget(b);
  // the default is specified through |alpha|^2 = M!, which sqrt-then-square would round
  b.energy_budget.alpha_cost = alpha ? std::norm(a) : static_cast<double>(tours);
  return b;
}

/// Tuple encoding on M truncated modes. alphas default to sqrt(M) each.
inline ModelBundle build_tsp_tuple(const tsp::TspInstance& inst, std::optional<std::vector<Complex>> alphas,
                                   std::optional<std::size_t> n_max_per_mode, const tsp::DsqPolicy& policy,
                                   double tail_tol = hilbert::kDefaultTailTol) {
  const std::size_t M = inst.size();
  if (M < 2 || M > kMaxTupleCities) {
    throw BudgetExceeded("build_tsp_tuple: M = " + std::to_string(M) + " outside [2, " +
                         std::to_string(kMaxTupleCities) + "]");
  }
  const std::vector<Complex> a =
      alphas.value_or(std::vector<Complex>(M, Complex(std::sqrt(static_cast<double>(M)), 0.0)));
  if (a.size() != M) throw InvalidArgument("build_tsp_tuple: need one alpha per city");

  std::size_t nm = n_max_per_mode.value_or(0);
  if (!n_max_per_mode) {
    for (const auto& ai : a) nm = std::max(nm, hilbert::default_n_max(ai));
  }
  if (nm + 1 < M) throw InvalidArgument("build_tsp_tuple: per-mode n_max must be >= M - 1");
  const double dim_estimate = std::pow(static_cast<double>(nm + 1), static_cast<double>(M));
  if (dim_estimate > static_cast<double>(kMaxTupleDim)) {
    throw BudgetExceeded("build_tsp_tuple: dimension " + std::to_string(dim_estimate) + " exceeds " +
                         std::to_string(kMaxTupleDim));
  }

  std::vector<StateVector> factors;
  std::vector<hilbert::CoherentQuadratic> terms;
  double tail = 0.0;
  double cost = 0.0;
  for (const auto& ai : a) {
    auto cs = hilbert::coherent_state(ai, nm, tail_tol);
    tail += cs.tail_mass;
    cost += std::norm(ai);
    factors.push_back(std::move(cs.state));
    terms.push_back({ai, nm});
  }

  const auto basis = hilbert::BasisSpec::modes(nm + 1, M);
  const auto lengths = tsp::effective_lengths(inst, policy);
  Eigen::VectorXd diag(static_cast<Eigen::Index>(basis.dim()));
  std::vector<std::size_t> digits(M, 0);
  for (Eigen::Index idx = 0; idx < diag.size(); ++idx) {
    bool in_range = true;
    std::size_t s0 = 0;  // s - 1
    for (std::size_t i = M; i-- > 0;) {
      in_range = in_range && digits[i] < M;
      s0 = s0 * M + digits[i];
    }
    diag[idx] = in_range ? lengths[s0] : inst.l_max();
    for (std::size_t i = 0; i < M; ++i) {
      if (++digits[i] <= nm) break;
      digits[i] = 0;
    }
  }

  ModelBundle b{"tsp-tuple",
                hilbert::ModeSum(std::move(terms)),
                hilbert::Diagonal(basis, std::move(diag)),
                hilbert::tensor_product(factors),
                {},
                {},
                [basis, M](std::size_t i) -> std::optional<std::vector<std::size_t>> {
                  if (i >= basis.dim()) return std::nullopt;
                  auto m = basis.multi_index(i);
                  for (auto v : m) {
                    if (v >= M) return std::nullopt;
                  }
                  if (!tsp::is_tour(m)) return std::nullopt;
                  return m;
                },
                std::nullopt,
                tail};
  b.target = detail::diagonal_target(b.H_P);
  detail::fill_budget(b);
  b.energy_budget.alpha_cost = alphas ? cost : static_cast<double>(M * M);
  return b;
}

inline ModelBundle build_tsp_finite(const tsp::TspInstance& inst, const tsp::DsqPolicy& policy) {
  const std::size_t M = inst.size();
  if (M < 2 || M > kMaxFiniteCities) {
    throw BudgetExceeded("build_tsp_finite: M = " + std::to_string(M) + " outside [2, " +
                         std::to_string(kMaxFiniteCities) + "]");
  }
  const auto mode = hilbert::BasisSpec::flat(M);
  std::vector<StateVector> factors(M, hilbert::uniform_state(mode));
  StateVector g_I = hilbert::tensor_product(factors);
  const auto lengths = tsp::effective_lengths(inst, policy);
  Eigen::VectorXd diag = Eigen::Map<const Eigen::VectorXd>(lengths.data(), static_cast<Eigen::Index>(lengths.size()));

  ModelBundle b{"tsp-finite",
                hilbert::ProjectorComplement(g_I),
                hilbert::Diagonal(g_I.basis, std::move(diag)),
                g_I,
                {},
                {},
                [M](std::size_t i) -> std::optional<std::vector<std::size_t>> {
                  if (i >= tsp::tuple_count(M)) return std::nullopt;
                  auto m = tsp::index_to_tuple(i + 1, M);
                  if (!tsp::is_tour(m)) return std::nullopt;
                  return m;
                },
                std::nullopt,
                0.0};
  b.target = detail::diagonal_target(b.H_P);
  detail::fill_budget(b);
  return b;
}

struct AsymptoteRow {
  std::size_t M = 0;
  double delta_ie = 0.0;
  double reference = 0.0;     ///< l_max (parity) or sqrt(2) sigma_d^2 (random): std of d^2
  double nontour_std = 0.0;   ///< exact population std over non-tour effective lengths
  double tour_fraction = 0.0; ///< M!/M^M
  double rel_deviation = 0.0; ///< |delta_ie - nontour_std| / nontour_std
  double l_max = 0.0;
};

/// Energy spread of the finite tuple model per M, with one sampled instance per M.
inline std::vector<AsymptoteRow> delta_ie_asymptote_study(const tsp::DistanceSampler& sampler, std::uint64_t seed,
                                                          std::size_t M_min, std::size_t M_max,
                                                          const tsp::DsqPolicy& policy) {
  if (M_min < 2 || M_max < M_min || M_max > kMaxFiniteCities) {
    throw BudgetExceeded("delta_ie_asymptote_study: M range must lie in [2, " + std::to_string(kMaxFiniteCities) + "]");
  }
  std::vector<AsymptoteRow> rows;
  for (std::size_t M = M_min; M <= M_max; ++M) {
    const auto inst = tsp::random_instance(M, sampler, seed);
    const auto bundle = build_tsp_finite(inst, policy);
    AsymptoteRow r;
    r.M = M;
    r.l_max = inst.l_max();
    r.delta_ie = bounds::delta_ie(bundle.g_I, bundle.H_P);
    r.reference = policy.kind == tsp::DsqPolicy::Kind::parity ? inst.l_max()
                                                              : std::sqrt(2.0) * policy.sigma_d * policy.sigma_d;
    const auto& diag = std::get<hilbert::Diagonal>(bundle.H_P).values;
    double mean = 0.0;
    std::size_t count = 0;
    std::vector<std::size_t> digits(M, 0);
    std::vector<double> nontour;
    for (Eigen::Index i = 0; i < diag.size(); ++i) {
      if (!tsp::is_tour(digits)) nontour.push_back(diag[i]);
      for (std::size_t k = 0; k < M; ++k) {
        if (++digits[k] < M) break;
        digits[k] = 0;
      }
    }
    for (double v : nontour) mean += v;
    count = nontour.size();
    mean /= static_cast<double>(count);
    double ss = 0.0;
    for (double v : nontour) ss += (v - mean) * (v - mean);
    r.nontour_std = std::sqrt(ss / static_cast<double>(count));
    r.tour_fraction = std::exp(tsp::log_tour_fraction(M));
    r.rel_deviation = std::abs(r.delta_ie - r.nontour_std) / r.nontour_std;
    rows.push_back(r);
  }
  return rows;
}

}  // namespace adiabound::models
