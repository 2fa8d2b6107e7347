#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

#include "adiabound/bounds/bounds.hpp"
#include "adiabound/errors.hpp"
#include "adiabound/models/models.hpp"

using namespace adiabound;
using namespace adiabound::models;
using tsp::DsqPolicy;
using tsp::TspInstance;

namespace {

TspInstance unit_triangle() { return TspInstance(3, {0, 1, 1, 1, 0, 1, 1, 1, 0}); }

TspInstance skew_triangle() { return TspInstance(3, {0, 1, 5, 2, 0, 1, 1, 4, 0}); }

const Eigen::VectorXd& diag_of(const ModelBundle& b) { return std::get<hilbert::Diagonal>(b.H_P).values; }

double residual(const ModelBundle& b) { return hilbert::apply(b.H_I, b.g_I).amps.norm(); }

std::vector<std::size_t> argmin_set(const Eigen::VectorXd& v, Eigen::Index n) {
  const double lo = v.head(n).minCoeff();
  std::vector<std::size_t> out;
  for (Eigen::Index i = 0; i < n; ++i) {
    if (tsp::lengths_tied(v[i], lo)) out.push_back(static_cast<std::size_t>(i));
  }
  return out;
}

}  // namespace

TEST(Grover, ClosedFormAndExpectation) {
  for (std::size_t N : {2u, 4u, 8u, 64u, 1024u}) {
    const auto b = build_grover(N, N / 2);
    ASSERT_TRUE(b.closed_form_delta_ie);
    EXPECT_NEAR(bounds::delta_ie(b.g_I, b.H_P), *b.closed_form_delta_ie, 1e-12) << N;
    EXPECT_NEAR(hilbert::expectation(b.H_P, b.g_I), 1.0 - 1.0 / static_cast<double>(N), 1e-12);
    EXPECT_LT(residual(b), 1e-12);
    EXPECT_EQ(b.target.indices, std::vector<std::size_t>{N / 2});
    EXPECT_EQ(b.target.energy, 0.0);
    EXPECT_EQ(b.decode(N / 2), std::vector<std::size_t>{N / 2});
  }
  EXPECT_NEAR(*build_grover(2, 0).closed_form_delta_ie, 0.5, 1e-15);
  EXPECT_NEAR(hilbert::expectation(build_grover(4, 0).H_P, build_grover(4, 0).g_I), 0.75, 1e-15);
  EXPECT_THROW(build_grover(4, 4), InvalidArgument);
  EXPECT_THROW(build_grover(1, 0), InvalidArgument);
}

TEST(Rank, UnitTriangleDiagonalAndOccupation) {
  const auto b = build_tsp_rank(unit_triangle());
  const auto& d = diag_of(b);
  ASSERT_GE(d.size(), 7);
  for (Eigen::Index n = 0; n < 6; ++n) EXPECT_NEAR(d[n], 3.0, 1e-15);
  for (Eigen::Index n = 6; n < d.size(); ++n) EXPECT_NEAR(d[n], 3.3, 1e-12);
  // <n> = sum n |c_n|^2 for the coherent state of |alpha|^2 = 6
  double mean_n = 0.0;
  for (Eigen::Index n = 0; n < b.g_I.amps.size(); ++n) mean_n += n * std::norm(b.g_I.amps[n]);
  EXPECT_NEAR(mean_n, 6.0, 1e-8);
  EXPECT_EQ(b.energy_budget.alpha_cost, 6.0);
  EXPECT_LT(residual(b), 1e-6);
  EXPECT_EQ(b.target.indices.size(), 6u);
  EXPECT_TRUE(b.target.degenerate());
}

TEST(Rank, AsymmetricArgminMatchesEnumeration) {
  const auto inst = skew_triangle();
  const auto b = build_tsp_rank(inst);
  const auto& d = diag_of(b);
  EXPECT_EQ(b.target.indices, argmin_set(d, 6));
  const auto best = tsp::brute_force_shortest(inst);
  EXPECT_NEAR(b.target.energy, best.length, 1e-12);
  for (auto i : b.target.indices) {
    const auto tour = b.decode(i);
    ASSERT_TRUE(tour);
    EXPECT_NEAR(tsp::tour_length(inst, *tour), best.length, 1e-12);
  }
  EXPECT_FALSE(b.decode(6));
}

TEST(Rank, RejectsShortTruncationAndLargeM) {
  EXPECT_THROW(build_tsp_rank(unit_triangle(), std::nullopt, 3), InvalidArgument);
  EXPECT_THROW(build_tsp_rank(tsp::random_instance(7, tsp::DistanceSampler::uniform(0, 1), 0)), BudgetExceeded);
}

TEST(Tuple, UnitTriangleEntries) {
  const auto inst = unit_triangle();
  const auto b = build_tsp_tuple(inst, std::nullopt, std::nullopt, DsqPolicy::parity());
  const auto& d = diag_of(b);
  const auto& basis = b.g_I.basis;
  const double l_max = inst.l_max();
  std::size_t tours = 0, in_range = 0;
  for (std::size_t i = 0; i < basis.dim(); ++i) {
    const auto m = basis.multi_index(i);
    if (std::any_of(m.begin(), m.end(), [](std::size_t v) { return v >= 3; })) {
      EXPECT_NEAR(d[static_cast<Eigen::Index>(i)], l_max, 1e-12);
      continue;
    }
    ++in_range;
    const auto s = tsp::tuple_to_index(m, 3);
    const double v = d[static_cast<Eigen::Index>(i)];
    if (tsp::is_tour(m)) {
      ++tours;
      EXPECT_NEAR(v, 3.0, 1e-15);
    } else {
      EXPECT_NEAR(v, s % 2 == 1 ? 3 * l_max : l_max, 1e-12) << "s=" << s;
    }
  }
  EXPECT_EQ(in_range, 27u);
  EXPECT_EQ(tours, 6u);
  EXPECT_NEAR(b.target.energy, 3.0, 1e-15);
  EXPECT_EQ(b.target.indices.size(), 6u);
  EXPECT_LT(residual(b), 1e-6);
}

TEST(Tuple, AlphaCostAndVacuum) {
  for (std::size_t M : {3u, 4u}) {
    const auto inst = tsp::random_instance(M, tsp::DistanceSampler::uniform(0, 1), 5);
    const auto b = build_tsp_tuple(inst, std::nullopt, std::nullopt, DsqPolicy::parity());
    EXPECT_NEAR(b.energy_budget.alpha_cost, static_cast<double>(M * M), 1e-12);
    EXPECT_TRUE(std::isfinite(b.energy_budget.path_bound(evolution::Schedule::linear(1.0))));
  }
  const auto vac = build_tsp_tuple(unit_triangle(), std::vector<hilbert::Complex>(3, 0.0), 2, DsqPolicy::parity());
  EXPECT_NEAR(std::abs(vac.g_I.amps[0]), 1.0, 1e-15);
  EXPECT_EQ(bounds::delta_ie(vac.g_I, vac.H_P), 0.0);
  EXPECT_EQ(vac.energy_budget.alpha_cost, 0.0);
}

TEST(Tuple, InRangeBlockMatchesFiniteModel) {
  const auto inst = tsp::random_instance(3, tsp::DistanceSampler::uniform(0, 1), 11);
  const auto policy = DsqPolicy::random(0.7, 4);
  const auto tup = build_tsp_tuple(inst, std::nullopt, std::nullopt, policy);
  const auto fin = build_tsp_finite(inst, policy);
  const auto& dt = diag_of(tup);
  const auto& df = diag_of(fin);
  std::size_t checked = 0;
  for (std::size_t i = 0; i < tup.g_I.basis.dim(); ++i) {
    const auto m = tup.g_I.basis.multi_index(i);
    if (std::any_of(m.begin(), m.end(), [](std::size_t v) { return v >= 3; })) continue;
    // both bases are little-endian, so the finite index is the tuple index minus one
    const auto s = tsp::tuple_to_index(m, 3);
    EXPECT_EQ(dt[static_cast<Eigen::Index>(i)], df[static_cast<Eigen::Index>(s - 1)]);
    EXPECT_EQ(fin.g_I.basis.multi_index(s - 1), m);
    ++checked;
  }
  EXPECT_EQ(checked, 27u);
  EXPECT_NEAR(tup.target.energy, fin.target.energy, 1e-15);
}

TEST(Tuple, BudgetExceeded) {
  EXPECT_THROW(build_tsp_tuple(tsp::random_instance(5, tsp::DistanceSampler::uniform(0, 1), 0), std::nullopt,
                               std::nullopt, DsqPolicy::parity()),
               BudgetExceeded);
  EXPECT_THROW(build_tsp_tuple(unit_triangle(), std::nullopt, 1, DsqPolicy::parity()), InvalidArgument);
}

TEST(Finite, UnitTriangle) {
  const auto inst = unit_triangle();
  const auto b = build_tsp_finite(inst, DsqPolicy::parity());
  EXPECT_NEAR(b.target.energy, 3.0, 1e-15);
  EXPECT_EQ(b.target.indices.size(), 6u);
  EXPECT_TRUE(b.target.degenerate());
  for (auto i : b.target.indices) EXPECT_TRUE(b.decode(i));
  const auto lengths = tsp::effective_lengths(inst, DsqPolicy::parity());
  const double mean = std::accumulate(lengths.begin(), lengths.end(), 0.0) / 27.0;
  EXPECT_NEAR(hilbert::expectation(b.H_P, b.g_I), mean, 1e-12);
  double ss = 0.0;
  for (double v : lengths) ss += (v - mean) * (v - mean);
  EXPECT_NEAR(bounds::delta_ie(b.g_I, b.H_P), std::sqrt(ss / 27.0), 1e-12);
  EXPECT_LT(residual(b), 1e-12);
}

TEST(Finite, GroundStateDecodesToShortestTour) {
  const auto inst = tsp::random_instance(4, tsp::DistanceSampler::uniform(0, 1), 2024);
  const auto b = build_tsp_finite(inst, DsqPolicy::parity());
  const auto best = tsp::brute_force_shortest(inst);
  ASSERT_FALSE(b.target.indices.empty());
  for (auto i : b.target.indices) {
    const auto tour = b.decode(i);
    ASSERT_TRUE(tour);
    EXPECT_TRUE(tsp::lengths_tied(tsp::tour_length(inst, *tour), best.length));
  }
  // every rotation of a shortest visiting order is a distinct tuple
  EXPECT_EQ(b.target.indices.size() % 4, 0u);
  EXPECT_FALSE(b.decode(0));
}

TEST(Bundles, ZeroGroundEnergyAndBruteForceAgreement) {
  const auto sampler = tsp::DistanceSampler::uniform(0, 1);
  for (std::size_t M = 3; M <= 5; ++M) {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
      const auto inst = tsp::random_instance(M, sampler, seed);
      const double best = tsp::brute_force_shortest(inst).length;
      std::vector<ModelBundle> bundles{build_tsp_rank(M <= 4 ? inst : tsp::random_instance(4, sampler, seed)),
                                       build_tsp_finite(inst, DsqPolicy::parity()),
                                       build_tsp_finite(inst, DsqPolicy::random(1.0, seed))};
      if (M <= 4) bundles.push_back(build_tsp_tuple(inst, std::nullopt, std::nullopt, DsqPolicy::parity()));
      for (std::size_t k = 0; k < bundles.size(); ++k) {
        const auto& b = bundles[k];
        EXPECT_LT(hilbert::expectation(b.H_I, b.g_I), 1e-6) << b.name;
        EXPECT_TRUE(std::isfinite(b.energy_budget.initial_norm_bound));
        EXPECT_TRUE(std::isfinite(b.energy_budget.problem_norm_bound));
        if (k == 0 && M > 4) continue;
        EXPECT_NEAR(b.target.energy, best, 1e-12) << b.name << " M=" << M;
      }
    }
  }
}

TEST(Asymptote, NonTourCountAndConvergence) {
  const auto rows = delta_ie_asymptote_study(tsp::DistanceSampler::uniform(0, 1), 7, 3, 5, DsqPolicy::parity());
  ASSERT_EQ(rows.size(), 3u);
  EXPECT_NEAR(rows[0].tour_fraction, 6.0 / 27.0, 1e-15);
  for (const auto& r : rows) {
    EXPECT_EQ(r.reference, r.l_max);
    EXPECT_GT(r.delta_ie, 0.0);
    EXPECT_GT(r.nontour_std, 0.0);
  }
  for (std::size_t i = 1; i < rows.size(); ++i) EXPECT_LT(rows[i].rel_deviation, rows[i - 1].rel_deviation);
  EXPECT_THROW(delta_ie_asymptote_study(tsp::DistanceSampler::uniform(0, 1), 7, 3, 7, DsqPolicy::parity()),
               BudgetExceeded);
}

TEST(Asymptote, EqualDistancesGiveNoTourVariance) {
  const auto inst = tsp::random_instance(4, tsp::DistanceSampler::constant(2.0), 0);
  const auto lengths = tsp::effective_lengths(inst, DsqPolicy::parity());
  for (std::uint64_t s = 1; s <= lengths.size(); ++s) {
    if (tsp::is_tour(tsp::index_to_tuple(s, 4))) {
      EXPECT_EQ(lengths[s - 1], 8.0);
    }
  }
}
