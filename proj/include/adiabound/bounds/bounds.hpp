#pragma once

// Time-energy lower bound for adiabatic runs.
//
// For psi(t) driven by f H_I + g H_P from g_I and phi(t) = e^{i xi(t)} g_I driven
// by f H_I + beta g, the distance obeys
//
//     ||psi(T) - phi(T)|| / ||(H_P - beta) g_I||  <=  int_0^T g,
//
// and ||psi - phi|| <= 2 always. Minimising the denominator over beta gives the
// energy spread delta_ie = sqrt(<H_P^2> - <H_P>^2), so a run cannot leave the
// neighbourhood of its initial state unhindered before int_0^T g reaches
// 2 / delta_ie. t_min is the T at which it does.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "adiabound/errors.hpp"
#include "adiabound/evolution/evolve.hpp"
#include "adiabound/evolution/schedule.hpp"
#include "adiabound/hilbert/hamiltonian.hpp"
#include "adiabound/hilbert/moments.hpp"
#include "adiabound/hilbert/state.hpp"

namespace adiabound::bounds {

using evolution::EvolutionResult;
using evolution::Schedule;
using hilbert::HamiltonianOp;
using hilbert::StateVector;

/// Slack below this is attributed to integrator error, not a violation.
inline constexpr double kSlackTol = 1e-7;

inline double delta_ie(const StateVector& g_I, const HamiltonianOp& H_P) {
  return std::sqrt(hilbert::variance(H_P, g_I));
}

struct BetaMinimum {
  double beta_star = 0.0;
  double min_value = 0.0;  ///< min over the grid of ||(H_P - beta) g_I||
};

/// `points` evenly spaced values covering mean +- 3 * spread (+-1 when spread is 0).
inline std::vector<double> default_beta_grid(double mean, double spread, std::size_t points = 2001) {
  const double half = spread > 0.0 ? 3.0 * spread : 1.0;
  std::vector<double> grid(points);
  for (std::size_t i = 0; i < points; ++i) {
    grid[i] = mean - half + 2.0 * half * static_cast<double>(i) / static_cast<double>(points - 1);
  }
  return grid;
}

inline BetaMinimum beta_minimum(const StateVector& g_I, const HamiltonianOp& H_P, std::span<const double> grid) {
  if (grid.size() < 2) throw InvalidArgument("beta_minimum: degenerate grid (fewer than 2 points)");
  const auto [lo, hi] = std::minmax_element(grid.begin(), grid.end());
  if (!(*hi > *lo)) throw InvalidArgument("beta_minimum: degenerate grid (zero span)");

  hilbert::require_same_basis(hilbert::basis_of(H_P), g_I.basis, "beta_minimum");
  const StateVector h = hilbert::apply(H_P, g_I);
  BetaMinimum best{grid.front(), std::numeric_limits<double>::infinity()};
  for (double beta : grid) {
    const double v = (h.amps - beta * g_I.amps).norm();
    if (v < best.min_value) best = {beta, v};
  }
  return best;
}

/// Smallest T with int_0^T g(tau; T) dtau = 2 / delta. Closed forms for linear
/// (4 / delta) and das_wei (2 / (delta (1/2 + sqrt(N)/6))); bisection otherwise.
inline double t_min_bisection(const Schedule& family, double delta, double rel_tol = 1e-12) {
  if (!(delta > 0.0)) throw InvalidArgument("t_min: delta must be positive");
  const double target = 2.0 / delta;
  double lo = 0.0;
  double hi = 1.0;
  while (evolution::schedule_integral(family.with_duration(hi)) < target) {
    lo = hi;
    hi *= 2.0;
    if (!std::isfinite(hi)) throw ConvergenceError("t_min: schedule integral does not reach the target");
  }
  while (hi - lo > rel_tol * hi) {
    const double mid = 0.5 * (lo + hi);
    (evolution::schedule_integral(family.with_duration(mid)) < target ? lo : hi) = mid;
  }
  return hi;
}

inline double t_min(const Schedule& family, double delta) {
  if (!(delta > 0.0)) throw InvalidArgument("t_min: delta must be positive");
  switch (family.kind()) {
    case Schedule::Kind::linear: return 4.0 / delta;
    case Schedule::Kind::das_wei:
      return 2.0 / (delta * (0.5 + std::sqrt(static_cast<double>(family.N())) / 6.0));
    case Schedule::Kind::local_adiabatic_grover: return t_min_bisection(family, delta);
  }
  return 0.0;
}

struct Margin {
  double beta = 0.0;
  double lhs = 0.0;            ///< ||psi(T) - phi(T)|| / ||(H_P - beta) g_I||
  double rhs = 0.0;            ///< int_0^T g
  double slack = 0.0;          ///< rhs - lhs
  double distance = 0.0;       ///< ||psi(T) - phi(T)||
  double shifted_norm = 0.0;   ///< ||(H_P - beta) g_I||
  bool applicable = true;      ///< false when g_I is an eigenstate of H_P at this beta
  bool holds = true;           ///< slack >= -kSlackTol and distance <= 2 + kSlackTol
};

/// Checks the distance inequality and the cap of 2 for each beta.
inline std::vector<Margin> verify_distance_bound(const EvolutionResult& run, const StateVector& g_I, double E_I0,
                                                 const HamiltonianOp& H_P, const Schedule& sch,
                                                 std::span<const double> betas) {
  hilbert::require_same_basis(run.final_state.basis, g_I.basis, "verify_distance_bound");
  const double rhs = evolution::schedule_integral(sch);
  const StateVector hg = hilbert::apply(H_P, g_I);
  std::vector<Margin> out;
  out.reserve(betas.size());
  for (double beta : betas) {
    Margin m;
    m.beta = beta;
    m.rhs = rhs;
    const StateVector phi = evolution::reference_phase_state(g_I, E_I0, sch, beta);
    m.distance = (run.final_state.amps - phi.amps).norm();
    m.shifted_norm = (hg.amps - beta * g_I.amps).norm();
    if (m.shifted_norm <= 1e-14 * std::max(1.0, std::abs(beta))) {
      m.applicable = false;
      m.lhs = std::numeric_limits<double>::quiet_NaN();
      m.slack = std::numeric_limits<double>::quiet_NaN();
      m.holds = m.distance <= 2.0 + kSlackTol;
    } else {
      m.lhs = m.distance / m.shifted_norm;
      m.slack = rhs - m.lhs;
      m.holds = m.slack >= -kSlackTol && m.distance <= 2.0 + kSlackTol;
    }
    out.push_back(m);
  }
  return out;
}

struct BoundReport {
  double delta_ie = 0.0;
  double integral_g = 0.0;
  double t_min = 0.0;
  double beta_star = 0.0;
  std::vector<Margin> margins;
  std::string theta_note =
      "the mean-value point theta with 2 <= g(theta) t_min delta_ie exists but is not evaluated";
};

/// Assembles delta_ie, the beta minimiser, t_min for the run's schedule family
/// and the per-beta margins.
inline BoundReport bound_report(const EvolutionResult& run, const StateVector& g_I, double E_I0,
                                const HamiltonianOp& H_P, std::span<const double> betas) {
  BoundReport r;
  r.delta_ie = delta_ie(g_I, H_P);
  r.integral_g = evolution::schedule_integral(run.schedule);
  r.t_min = r.delta_ie > 0.0 ? t_min(run.schedule, r.delta_ie) : std::numeric_limits<double>::infinity();
  const double mean = hilbert::expectation(H_P, g_I);
  const auto grid = default_beta_grid(mean, r.delta_ie);
  r.beta_star = beta_minimum(g_I, H_P, grid).beta_star;
  r.margins = verify_distance_bound(run, g_I, E_I0, H_P, run.schedule, betas);
  return r;
}

/// beta in {0, <H_P>, <H_P> - delta_ie, <H_P> + delta_ie}
inline std::vector<double> standard_betas(const StateVector& g_I, const HamiltonianOp& H_P) {
  const double mean = hilbert::expectation(H_P, g_I);
  const double d = delta_ie(g_I, H_P);
  return {0.0, mean, mean - d, mean + d};
}

}  // namespace adiabound::bounds
