#pragma once

// Lowest eigenpairs of Hermitian operators given only their action.
//
// Explicitly restarted Lanczos with full reorthogonalisation. Each cycle
// builds a Krylov basis, takes the lowest Ritz pair of the real tridiagonal
// projection and restarts from that Ritz vector. A cycle that fails to cut the
// residual by half restarts from a perturbed vector instead. Further
// eigenpairs come from running the same iteration in the orthogonal
// complement of the pairs already found.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "adiabound/errors.hpp"
#include "adiabound/hilbert/hamiltonian.hpp"
#include "adiabound/hilbert/state.hpp"
#include "adiabound/rng.hpp"

namespace adiabound::hilbert {

struct LanczosOptions {
  double rel_tol = 1e-8;             ///< residual target relative to the spectral scale
  std::size_t max_matvecs = 10000;
  std::size_t krylov_dim = 80;
  std::uint64_t seed = 0x1a2c705;
};

struct EigenPair {
  double value = 0.0;
  CVector vector;
  double residual = 0.0;  ///< ||H x - value x||
  std::size_t matvecs = 0;
};

namespace detail {

inline CVector random_vector(Eigen::Index n, std::mt19937_64& gen) {
  std::normal_distribution<double> normal;
  CVector v(n);
  for (Eigen::Index i = 0; i < n; ++i) v[i] = Complex(normal(gen), normal(gen));
  return v;
}

inline void project_out(CVector& v, std::span<const CVector> basis) {
  for (int pass = 0; pass < 2; ++pass) {
    for (const auto& b : basis) v -= b.dot(v) * b;
  }
}

}  // namespace detail

/// Lowest eigenpair of the Hermitian map `apply(x, y)` (y = H x) restricted to
/// the orthogonal complement of `deflate`.
template <typename Apply>
EigenPair lanczos_lowest(Apply&& apply, Eigen::Index n, const LanczosOptions& opt = {},
                         std::span<const CVector> deflate = {}, const CVector* start = nullptr) {
  const auto free_dim = n - static_cast<Eigen::Index>(deflate.size());
  if (free_dim < 1) throw InvalidArgument("lanczos_lowest: nothing left after deflation");
  std::mt19937_64 gen(opt.seed);

  CVector x = start ? *start : detail::random_vector(n, gen);
  detail::project_out(x, deflate);
  if (x.norm() < 1e-300) x = detail::random_vector(n, gen), detail::project_out(x, deflate);
  x.normalize();

  EigenPair best;
  best.residual = std::numeric_limits<double>::infinity();
  std::size_t matvecs = 0;
  double scale = 0.0;
  CVector w, hx;

  while (matvecs < opt.max_matvecs) {
    const Eigen::Index m = std::min<Eigen::Index>(static_cast<Eigen::Index>(opt.krylov_dim), free_dim);
    std::vector<CVector> V;
    V.reserve(static_cast<std::size_t>(m));
    std::vector<double> alpha, beta;
    V.push_back(x);
    bool invariant = false;
    for (Eigen::Index j = 0; j < m; ++j) {
      apply(V.back(), w);
      ++matvecs;
      const double a = V.back().dot(w).real();
      alpha.push_back(a);
      for (int pass = 0; pass < 2; ++pass) {
        for (const auto& v : V) w -= v.dot(w) * v;
        detail::project_out(w, deflate);
      }
      const double b = w.norm();
      scale = std::max({scale, std::abs(a), b});
      if (j + 1 == m) break;
      if (b <= 1e-13 * std::max(scale, 1e-300)) {
        invariant = true;
        break;
      }
      beta.push_back(b);
      V.push_back(w / b);
    }

    const auto k = static_cast<Eigen::Index>(alpha.size());
    Eigen::MatrixXd T = Eigen::MatrixXd::Zero(k, k);
    for (Eigen::Index i = 0; i < k; ++i) {
      T(i, i) = alpha[static_cast<std::size_t>(i)];
      if (i + 1 < k) T(i, i + 1) = T(i + 1, i) = beta[static_cast<std::size_t>(i)];
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tri(T);
    const Eigen::VectorXd y = tri.eigenvectors().col(0);
    scale = std::max(scale, tri.eigenvalues().cwiseAbs().maxCoeff());

    CVector ritz = CVector::Zero(n);
    for (Eigen::Index i = 0; i < k; ++i) ritz += y[i] * V[static_cast<std::size_t>(i)];
    detail::project_out(ritz, deflate);
    ritz.normalize();
    apply(ritz, hx);
    ++matvecs;
    const double rayleigh = ritz.dot(hx).real();
    CVector r = hx - rayleigh * ritz;
    detail::project_out(r, deflate);
    const double res = r.norm();

    const bool improved = res < 0.5 * best.residual;
    if (res < best.residual) best = {rayleigh, ritz, res, matvecs};
    best.matvecs = matvecs;
    if (invariant || res <= opt.rel_tol * std::max(scale, 1e-300)) return best;

    x = best.vector;
    if (!improved) {
      CVector kick = detail::random_vector(n, gen);
      detail::project_out(kick, deflate);
      x += 1e-3 * kick / kick.norm();
      detail::project_out(x, deflate);
      x.normalize();
    }
  }
  throw ConvergenceError("lanczos_lowest: residual " + std::to_string(best.residual) + " after " +
                         std::to_string(matvecs) + " matvecs (target " +
                         std::to_string(opt.rel_tol * scale) + ")");
}

/// The k lowest eigenpairs by successive deflation, ascending.
template <typename Apply>
std::vector<EigenPair> lowest_eigenpairs(Apply&& apply, Eigen::Index n, std::size_t k,
                                         const LanczosOptions& opt = {}) {
  std::vector<EigenPair> out;
  std::vector<CVector> found;
  for (std::size_t i = 0; i < k; ++i) {
    LanczosOptions o = opt;
    o.seed = opt.seed + i;
    out.push_back(lanczos_lowest(apply, n, o, found));
    found.push_back(out.back().vector);
  }
  std::sort(out.begin(), out.end(), [](const auto& a, const auto& b) { return a.value < b.value; });
  return out;
}

/// max ||H x|| / ||x|| by power iteration.
template <typename Apply>
double power_norm_estimate(Apply&& apply, Eigen::Index n, std::size_t iterations = 300,
                           std::uint64_t seed = 0x90e7) {
  std::mt19937_64 gen(seed);
  CVector x = detail::random_vector(n, gen);
  x.normalize();
  CVector y;
  double est = 0.0;
  for (std::size_t it = 0; it < iterations; ++it) {
    apply(x, y);
    const double ny = y.norm();
    est = std::max(est, ny);
    if (ny == 0.0) break;
    x = y / ny;
  }
  return est;
}

struct GroundState {
  double energy = 0.0;
  StateVector state;
  bool degenerate = false;
  /// Basis indices of a degenerate diagonal ground space (diagonal operators only).
  std::vector<std::size_t> argmin_set;
  double residual = 0.0;
  std::size_t matvecs = 0;
};

inline constexpr double kDegeneracyRelTol = 1e-12;

inline GroundState ground_state(const HamiltonianOp& H, const LanczosOptions& opt = {}) {
  const BasisSpec basis = basis_of(H);
  if (const auto* d = std::get_if<Diagonal>(&H)) {
    Eigen::Index imin = 0;
    const double emin = d->values.minCoeff(&imin);
    const double tol = kDegeneracyRelTol * std::max(1.0, std::abs(emin));
    std::vector<std::size_t> set;
    for (Eigen::Index i = 0; i < d->values.size(); ++i) {
      if (d->values[i] - emin <= tol) set.push_back(static_cast<std::size_t>(i));
    }
    const std::size_t first = set.front();
    return {d->values[static_cast<Eigen::Index>(first)], basis_state(basis, first), set.size() > 1, set, 0.0, 0};
  }
  if (const auto* p = std::get_if<ProjectorComplement>(&H)) {
    return {0.0, p->v, false, {}, 0.0, 0};
  }
  const auto n = static_cast<Eigen::Index>(basis.dim());
  auto mv = [&](const CVector& x, CVector& y) { apply_into(H, x, y); };
  auto pairs = lowest_eigenpairs(mv, n, std::min<std::size_t>(2, basis.dim()), opt);
  const double scale = std::max(1.0, norm_bound(H));
  GroundState g{pairs[0].value, StateVector(basis, pairs[0].vector), false, {}, pairs[0].residual,
                pairs[0].matvecs + (pairs.size() > 1 ? pairs[1].matvecs : 0)};
  if (pairs.size() > 1) g.degenerate = pairs[1].value - pairs[0].value <= 1e-8 * scale;
  return g;
}

}  // namespace adiabound::hilbert
