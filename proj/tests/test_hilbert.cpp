#include <gtest/gtest.h>

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <random>
#include <sstream>
#include <vector>

#include "adiabound/errors.hpp"
#include "adiabound/hilbert/coherent.hpp"
#include "adiabound/hilbert/eigensolver.hpp"
#include "adiabound/hilbert/hamiltonian.hpp"
#include "adiabound/hilbert/moments.hpp"
#include "adiabound/hilbert/state.hpp"

using namespace adiabound;
using namespace adiabound::hilbert;

namespace {

StateVector random_state(const BasisSpec& b, std::uint64_t seed) {
  std::mt19937_64 gen(seed);
  std::normal_distribution<double> n;
  CVector v(static_cast<Eigen::Index>(b.dim()));
  for (auto& x : v) x = Complex(n(gen), n(gen));
  return normalized(StateVector(b, v));
}

CVector random_vec(Eigen::Index n, std::mt19937_64& gen) {
  std::normal_distribution<double> d;
  CVector v(n);
  for (auto& x : v) x = Complex(d(gen), d(gen));
  return v;
}

// Dense (a^dag - conj a)(a - a) on n_max + 1 levels from the truncated ladder
// matrix: a has sqrt(n) on the superdiagonal; the product keeps a^dag a exact.
Eigen::MatrixXcd dense_coherent(Complex alpha, std::size_t n_max) {
  const auto n = static_cast<Eigen::Index>(n_max + 1);
  Eigen::MatrixXcd a = Eigen::MatrixXcd::Zero(n, n);
  for (Eigen::Index k = 1; k < n; ++k) a(k - 1, k) = std::sqrt(static_cast<double>(k));
  const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
  return (a.adjoint() - std::conj(alpha) * id) * (a - alpha * id);
}

std::vector<HamiltonianOp> sample_ops() {
  std::vector<HamiltonianOp> ops;
  Eigen::VectorXd vals(6);
  vals << 0.3, -1.0, 2.0, 0.0, 5.5, 1.25;
  ops.emplace_back(Diagonal(vals));
  ops.emplace_back(ProjectorComplement(random_state(BasisSpec::flat(6), 1)));
  ops.emplace_back(CoherentQuadratic{{1.2, -0.4}, 12});
  ops.emplace_back(ModeSum({CoherentQuadratic{{0.7, 0.2}, 5}, CoherentQuadratic{{-0.3, 0.9}, 5},
                            CoherentQuadratic{{1.1, 0.0}, 5}}));
  return ops;
}

}  // namespace

TEST(Basis, MultiIndexIsLittleEndianBijection) {
  const auto b = BasisSpec::modes(3, 4);
  EXPECT_EQ(b.dim(), 81u);
  for (std::size_t i = 0; i < b.dim(); ++i) {
    const auto m = b.multi_index(i);
    EXPECT_EQ(m[0] + 3 * m[1] + 9 * m[2] + 27 * m[3], i);
    EXPECT_EQ(b.flat_index(m), i);
  }
  EXPECT_THROW(BasisSpec::flat(1), InvalidArgument);
}

TEST(State, NormalizationAndTensorProduct) {
  const auto u = uniform_state(BasisSpec::flat(4));
  EXPECT_TRUE(u.is_normalized());
  std::vector<StateVector> f{random_state(BasisSpec::flat(3), 2), random_state(BasisSpec::flat(3), 3)};
  const auto t = tensor_product(f);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      EXPECT_LT(std::abs(t.amps[static_cast<Eigen::Index>(i + 3 * j)] - f[0].amps[i] * f[1].amps[j]), 1e-15);
  std::ostringstream os;
  write_dump(os, basis_state(BasisSpec::flat(2), 1));
  EXPECT_EQ(os.str(), "0 0 0\n1 1 0\n");
}

TEST(Apply, Examples) {
  Eigen::VectorXd v(2);
  v << 1.0, 2.0;
  const HamiltonianOp D = Diagonal(v);
  const auto e0 = basis_state(BasisSpec::flat(2), 0);
  EXPECT_LT((hilbert::apply(D, e0).amps - e0.amps).norm(), 1e-15);

  const auto w = random_state(BasisSpec::flat(5), 4);
  EXPECT_LT(hilbert::apply(HamiltonianOp(ProjectorComplement(w)), w).amps.norm(), 1e-14);

  const HamiltonianOp C = CoherentQuadratic{{0.0, 0.0}, 3};
  const auto n2 = basis_state(BasisSpec::fock(3), 2);
  EXPECT_LT((hilbert::apply(C, n2).amps - 2.0 * n2.amps).norm(), 1e-14);

  EXPECT_THROW(hilbert::apply(D, w), InvalidArgument);
}

TEST(Apply, HermitianAgainstDenseAndPsd) {
  std::mt19937_64 gen(7);
  for (const auto& H : sample_ops()) {
    const auto n = static_cast<Eigen::Index>(basis_of(H).dim());
    const Eigen::MatrixXcd M = to_dense(H);
    EXPECT_LT((M - M.adjoint()).norm(), 1e-12);
    for (int k = 0; k < 100; ++k) {
      const CVector x = random_vec(n, gen), y = random_vec(n, gen);
      CVector hx(n), hy(n);
      apply_into(H, x, hx);
      apply_into(H, y, hy);
      const Complex xy = x.dot(hy), yx = y.dot(hx);
      ASSERT_LT(std::abs(xy - std::conj(yx)), 1e-10 * (1.0 + std::abs(xy)));
      if (!std::holds_alternative<Diagonal>(H)) {
        ASSERT_GE(x.dot(hx).real(), -1e-10);
      }
    }
    const double bound = norm_bound(H);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(M);
    EXPECT_LE(es.eigenvalues().cwiseAbs().maxCoeff(), bound * (1 + 1e-12));
  }
}

TEST(Apply, ProjectorIsIdempotent) {
  std::mt19937_64 gen(8);
  const HamiltonianOp P = ProjectorComplement(random_state(BasisSpec::flat(9), 5));
  for (int k = 0; k < 100; ++k) {
    const CVector x = random_vec(9, gen);
    CVector px(9), ppx(9);
    apply_into(P, x, px);
    apply_into(P, px, ppx);
    ASSERT_LT((px - ppx).norm(), 1e-10 * x.norm());
  }
}

TEST(Apply, CoherentMatchesLadderConstruction) {
  const Complex alpha(0.8, -1.3);
  const HamiltonianOp C = CoherentQuadratic{alpha, 9};
  EXPECT_LT((to_dense(C) - dense_coherent(alpha, 9)).norm(), 1e-12);
}

TEST(Apply, ModeSumMatchesKroneckerAssembly) {
  for (std::size_t d : {3, 5, 8}) {
    const Complex a0(0.6, 0.1), a1(-0.4, 0.7);
    const HamiltonianOp S = ModeSum({CoherentQuadratic{a0, d - 1}, CoherentQuadratic{a1, d - 1}});
    const auto n = static_cast<Eigen::Index>(d);
    const Eigen::MatrixXcd id = Eigen::MatrixXcd::Identity(n, n);
    const Eigen::MatrixXcd h0 = dense_coherent(a0, d - 1), h1 = dense_coherent(a1, d - 1);
    // little-endian: flat = m0 + d * m1, so mode 1 is the slow index
    Eigen::MatrixXcd ref = Eigen::MatrixXcd::Zero(n * n, n * n);
    for (Eigen::Index i = 0; i < n; ++i)
      for (Eigen::Index j = 0; j < n; ++j) {
        ref.block(i * n, j * n, n, n) += h1(i, j) * id;
        if (i == j) ref.block(i * n, j * n, n, n) += h0;
      }
    EXPECT_LT((to_dense(S) - ref).norm(), 1e-12);
  }
}

TEST(Coherent, VacuumAndMoments) {
  const auto vac = coherent_state({0.0, 0.0}, 5);
  EXPECT_EQ(vac.state.amps[0], Complex(1.0, 0.0));
  EXPECT_EQ(vac.state.amps.tail(5).norm(), 0.0);

  const auto cs = coherent_state({2.0, 0.0}, 40);
  Eigen::VectorXd nvals(41);
  for (int n = 0; n <= 40; ++n) nvals[n] = n;
  const HamiltonianOp N = Diagonal(BasisSpec::fock(40), nvals);
  EXPECT_NEAR(expectation(N, cs.state), 4.0, 1e-8);
  EXPECT_NEAR(variance(N, cs.state), 4.0, 1e-8);
  EXPECT_NEAR(cs.captured_mass + cs.tail_mass, 1.0, 1e-12);
}

TEST(Coherent, AmplitudesMatchClosedForm) {
  const Complex alpha(1.1, 0.6);
  const auto cs = coherent_state(alpha, 30);
  // e^{-|a|^2/2} a^n / sqrt(n!) by recurrence, renormalised
  CVector ref(31);
  ref[0] = std::exp(-std::norm(alpha) / 2);
  for (int n = 1; n <= 30; ++n) ref[n] = ref[n - 1] * alpha / std::sqrt(static_cast<double>(n));
  ref.normalize();
  EXPECT_LT((cs.state.amps - ref).norm(), 1e-13);
}

TEST(Coherent, TruncationErrorNamesMinimalNmax) {
  try {
    coherent_state({3.0, 0.0}, 10);
    FAIL();
  } catch (const TruncationError& e) {
    const auto n = e.minimal_n_max();
    EXPECT_GT(n, 10u);
    EXPECT_NO_THROW(coherent_state({3.0, 0.0}, n));
    EXPECT_THROW(coherent_state({3.0, 0.0}, n - 1), TruncationError);
  }
  EXPECT_EQ(default_n_max({3.0, 4.0}), 85u);  // 25 + 50 + 10
}

TEST(Moments, Examples) {
  Eigen::VectorXd v(2);
  v << 0.0, 1.0;
  const HamiltonianOp D = Diagonal(v);
  const auto psi = uniform_state(BasisSpec::flat(2));
  EXPECT_NEAR(expectation(D, psi), 0.5, 1e-15);
  EXPECT_NEAR(variance(D, psi), 0.25, 1e-15);
  EXPECT_NEAR(variance(D, basis_state(BasisSpec::flat(2), 1)), 0.0, 1e-15);

  const auto g = uniform_state(BasisSpec::flat(4));
  const HamiltonianOp HP = ProjectorComplement(basis_state(BasisSpec::flat(4), 2));
  EXPECT_NEAR(variance(HP, g), 3.0 / 16.0, 1e-15);

  StateVector bad(BasisSpec::flat(2), CVector::Constant(2, 1.0));
  EXPECT_THROW(expectation(D, bad), InvalidArgument);
}

TEST(Moments, VarianceIsMinimumOfShiftedNorm) {
  for (const auto& H : sample_ops()) {
    const auto psi = random_state(basis_of(H), 13);
    const double mu = expectation(H, psi), var = variance(H, psi);
    const double at_mu = shifted_norm(H, psi, mu);
    EXPECT_NEAR(at_mu * at_mu, var, 1e-12 * (1 + var));
    for (double db : {-0.3, -0.01, 0.01, 0.3}) EXPECT_GT(shifted_norm(H, psi, mu + db), at_mu);
  }
}

TEST(GroundState, DiagonalAndProjector) {
  Eigen::VectorXd v(5);
  v << 3.0, 1.0, 4.0, 1.0, 5.0;
  const auto g = ground_state(HamiltonianOp(Diagonal(v)));
  EXPECT_EQ(g.energy, 1.0);
  EXPECT_TRUE(g.degenerate);
  EXPECT_EQ(g.argmin_set, (std::vector<std::size_t>{1, 3}));
  EXPECT_EQ(g.state.amps[1], Complex(1.0, 0.0));

  const auto w = random_state(BasisSpec::flat(6), 21);
  const auto p = ground_state(HamiltonianOp(ProjectorComplement(w)));
  EXPECT_EQ(p.energy, 0.0);
  EXPECT_LT((p.state.amps - w.amps).norm(), 1e-15);
}

TEST(GroundState, CoherentQuadraticAgainstDense) {
  const Complex alpha(1.5, 0.0);
  const HamiltonianOp C = CoherentQuadratic{alpha, 40};
  const auto g = ground_state(C);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(dense_coherent(alpha, 40));
  EXPECT_NEAR(g.energy, es.eigenvalues()[0], 1e-8);
  EXPECT_NEAR(g.energy, 0.0, 1e-6);
  EXPECT_GE(overlap_probability(g.state, coherent_state(alpha, 40).state), 1.0 - 1e-6);
  EXPECT_FALSE(g.degenerate);
}

TEST(GroundState, LanczosLowestPairsOfRandomHermitian) {
  std::mt19937_64 gen(31);
  const Eigen::Index n = 300;
  Eigen::MatrixXcd A(n, n);
  for (Eigen::Index j = 0; j < n; ++j) A.col(j) = random_vec(n, gen);
  const Eigen::MatrixXcd H = (A + A.adjoint()) / 2.0;
  auto mv = [&](const CVector& x, CVector& y) { y.noalias() = H * x; };
  const auto pairs = lowest_eigenpairs(mv, n, 3);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(H, Eigen::EigenvaluesOnly);
  for (int k = 0; k < 3; ++k) EXPECT_NEAR(pairs[k].value, es.eigenvalues()[k], 1e-7 * es.eigenvalues().cwiseAbs().maxCoeff());
  const double pn = power_norm_estimate(mv, n);
  EXPECT_NEAR(pn, es.eigenvalues().cwiseAbs().maxCoeff(), 1e-6 * pn);
}
