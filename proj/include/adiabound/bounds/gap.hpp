#pragma once

// Spectral gap along the interpolation path H(s) = f(sT) H_I + g(sT) H_P,
// s in [0, 1]. Dense diagonalisation up to kDenseGapDim, deflated Lanczos above.
//
// t_adb = ||H_P - H_I|| / g_min^2 is the usual adiabatic-theorem estimate and is
// only a heuristic comparator for t_min.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <vector>

#include "adiabound/errors.hpp"
#include "adiabound/evolution/schedule.hpp"
#include "adiabound/hilbert/eigensolver.hpp"
#include "adiabound/hilbert/hamiltonian.hpp"

namespace adiabound::bounds {

inline constexpr std::size_t kDenseGapDim = 2048;
inline constexpr double kLevelCrossingGap = 1e-10;

struct GapReport {
  std::vector<double> grid;  ///< s values, ascending
  std::vector<double> E0;
  std::vector<double> E1;
  double g_min = 0.0;
  double g_min_location = 0.0;
  double norm_dH = 0.0;  ///< power-iteration estimate of ||H_P - H_I||
  double t_adb = 0.0;
  bool level_crossing = false;  ///< g_min below 1e-10
};

struct GapScanOptions {
  std::size_t grid_size = 201;
  std::size_t refine_rounds = 3;
  std::size_t refine_factor = 5;
};

namespace detail {

class PathSpectrum {
 public:
  PathSpectrum(const hilbert::HamiltonianOp& H_I, const hilbert::HamiltonianOp& H_P,
               const evolution::Schedule& sch)
      : H_I_(H_I), H_P_(H_P), sch_(sch), dim_(hilbert::basis_of(H_I).dim()) {
    hilbert::require_same_basis(hilbert::basis_of(H_I), hilbert::basis_of(H_P), "gap_scan");
    if (dim_ <= kDenseGapDim) {
      A_ = hilbert::to_dense(H_I);
      B_ = hilbert::to_dense(H_P);
    }
  }

  /// Lowest two eigenvalues at normalized time s.
  std::pair<double, double> lowest_two(double s) const {
    const double f = sch_.f_unit(s);
    const double g = sch_.g_unit(s);
    if (dim_ <= kDenseGapDim) {
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(f * A_ + g * B_, Eigen::EigenvaluesOnly);
      return {es.eigenvalues()[0], es.eigenvalues()[1]};
    }
    hilbert::OperatorSum H({{f, &H_I_}, {g, &H_P_}});
    auto mv = [&](const hilbert::CVector& x, hilbert::CVector& y) { H.apply_into(x, y); };
    const auto pairs = hilbert::lowest_eigenpairs(mv, static_cast<Eigen::Index>(dim_), 2);
    return {pairs[0].value, pairs[1].value};
  }

 private:
  const hilbert::HamiltonianOp& H_I_;
  const hilbert::HamiltonianOp& H_P_;
  evolution::Schedule sch_;
  std::size_t dim_;
  Eigen::MatrixXcd A_, B_;
};

}  // namespace detail

inline GapReport gap_scan(const hilbert::HamiltonianOp& H_I, const hilbert::HamiltonianOp& H_P,
                          const evolution::Schedule& sch, const GapScanOptions& opt = {}) {
  if (opt.grid_size < 2) throw InvalidArgument("gap_scan: grid_size must be >= 2");
  const detail::PathSpectrum spectrum(H_I, H_P, sch);

  std::map<double, std::pair<double, double>> samples;
  auto eval = [&](double s) {
    s = std::clamp(s, 0.0, 1.0);
    if (!samples.contains(s)) samples.emplace(s, spectrum.lowest_two(s));
  };
  auto argmin_gap = [&] {
    auto best = samples.begin();
    for (auto it = samples.begin(); it != samples.end(); ++it) {
      if (it->second.second - it->second.first < best->second.second - best->second.first) best = it;
    }
    return best->first;
  };

  for (std::size_t i = 0; i < opt.grid_size; ++i) {
    eval(static_cast<double>(i) / static_cast<double>(opt.grid_size - 1));
  }
  double spacing = 1.0 / static_cast<double>(opt.grid_size - 1);
  for (std::size_t round = 0; round < opt.refine_rounds; ++round) {
    const double centre = argmin_gap();
    const double fine = spacing / static_cast<double>(opt.refine_factor);
    const auto half = static_cast<long>(opt.refine_factor);
    for (long k = -half; k <= half; ++k) eval(centre + static_cast<double>(k) * fine);
    spacing = fine;
  }

  GapReport r;
  for (const auto& [s, e] : samples) {
    r.grid.push_back(s);
    r.E0.push_back(e.first);
    r.E1.push_back(e.second);
  }
  r.g_min_location = argmin_gap();
  const auto& at = samples.at(r.g_min_location);
  r.g_min = at.second - at.first;

  hilbert::OperatorSum diff({{1.0, &H_P}, {-1.0, &H_I}});
  auto mv = [&](const hilbert::CVector& x, hilbert::CVector& y) { diff.apply_into(x, y); };
  r.norm_dH = hilbert::power_norm_estimate(mv, static_cast<Eigen::Index>(diff.basis().dim()));
  r.level_crossing = r.g_min < kLevelCrossingGap;
  r.t_adb = r.level_crossing ? std::numeric_limits<double>::infinity() : r.norm_dH / (r.g_min * r.g_min);
  return r;
}

}  // namespace adiabound::bounds
