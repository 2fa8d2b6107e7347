#pragma once

// Fixed-step RK4 integration of i d/dt psi = (f(t) H_I + g(t) H_P) psi.
//
// Step rule: h <= step_bound_factor / B with B = max f * ||H_I|| + max g * ||H_P||
// (certified norm bounds). RK4 on a skew-Hermitian generator loses norm at
// (hB)^6 / 144 per step, so h is further capped so the accumulated drift over
// the run stays below half of norm_tol.

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "adiabound/errors.hpp"
#include "adiabound/evolution/schedule.hpp"
#include "adiabound/hilbert/eigensolver.hpp"
#include "adiabound/hilbert/hamiltonian.hpp"
#include "adiabound/hilbert/state.hpp"

namespace adiabound::evolution {

using hilbert::Complex;
using hilbert::CVector;
using hilbert::HamiltonianOp;
using hilbert::StateVector;

struct StepPolicy {
  double step_bound_factor = 0.1;
  double norm_tol = 1e-8;
  std::size_t samples_per_run = 256;
  /// Overrides the step rule (the step is shrunk to divide T evenly).
  std::optional<double> fixed_step;
  /// Renormalize after every step; drift is measured before renormalizing.
  bool renormalize = false;
  /// Record |<ground(H(t))|psi(t)>|^2 at each sample (one eigensolve per sample).
  bool track_ground_overlap = false;
};

struct TrajectorySample {
  double t = 0.0;
  double ground_overlap = std::numeric_limits<double>::quiet_NaN();
  double norm = 1.0;
};

struct EvolutionResult {
  StateVector final_state;
  std::vector<TrajectorySample> trajectory;
  std::size_t steps = 0;
  double step = 0.0;
  double max_norm_drift = 0.0;
  double operator_bound = 0.0;  ///< B used by the step rule
  Schedule schedule;
  StepPolicy policy;
};

/// Upper bound on ||H(t)|| over the whole schedule.
inline double path_norm_bound(const HamiltonianOp& H_I, const HamiltonianOp& H_P, const Schedule& s) {
  return s.max_f() * hilbert::norm_bound(H_I) + s.max_g() * hilbert::norm_bound(H_P);
}

/// Step size chosen by the policy for a run of duration T with operator bound B.
inline double choose_step(double T, double B, const StepPolicy& p) {
  if (p.fixed_step) {
    if (!(*p.fixed_step > 0.0)) throw InvalidArgument("fixed_step must be positive");
    return *p.fixed_step;
  }
  if (!(p.step_bound_factor > 0.0)) throw InvalidArgument("step_bound_factor must be positive");
  if (!(p.norm_tol > 0.0)) throw InvalidArgument("norm_tol must be positive");
  const double B_eff = std::max(B, 1e-300);
  double h = p.step_bound_factor / B_eff;
  if (T > 0.0) {
    const double drift_cap = std::pow(72.0 * p.norm_tol / (T * std::pow(B_eff, 6)), 0.2);
    h = std::min(h, drift_cap);
  }
  return h;
}

inline double instantaneous_ground_overlap(const HamiltonianOp& H_I, const HamiltonianOp& H_P, double f,
                                           double g, const CVector& psi) {
  hilbert::OperatorSum H({{f, &H_I}, {g, &H_P}});
  auto mv = [&](const CVector& x, CVector& y) { H.apply_into(x, y); };
  const auto pair = hilbert::lanczos_lowest(mv, psi.size());
  return std::norm(pair.vector.dot(psi));
}

/// Integrates from psi(0) = g_I to t = T.
inline EvolutionResult evolve(const HamiltonianOp& H_I, const HamiltonianOp& H_P, const StateVector& g_I,
                              const Schedule& sch, const StepPolicy& policy = {}) {
  hilbert::require_same_basis(hilbert::basis_of(H_I), hilbert::basis_of(H_P), "evolve");
  hilbert::require_same_basis(hilbert::basis_of(H_I), g_I.basis, "evolve");
  if (policy.samples_per_run < 2) throw InvalidArgument("samples_per_run must be >= 2");

  const double T = sch.T();
  const double B = path_norm_bound(H_I, H_P, sch);
  EvolutionResult res{g_I, {}, 0, 0.0, 0.0, B, sch, policy};

  auto sample = [&](double t, const CVector& psi) {
    TrajectorySample s{t, std::numeric_limits<double>::quiet_NaN(), psi.norm()};
    if (policy.track_ground_overlap) s.ground_overlap = instantaneous_ground_overlap(H_I, H_P, sch.f(t), sch.g(t), psi);
    res.trajectory.push_back(s);
  };

  if (T == 0.0) {
    sample(0.0, g_I.amps);
    return res;
  }

  const double h_max = choose_step(T, B, policy);
  const auto n = static_cast<std::size_t>(std::ceil(T / h_max - 1e-12));
  const double h = T / static_cast<double>(n);
  res.steps = n;
  res.step = h;

  const std::size_t samples = std::min(policy.samples_per_run, n + 1);
  std::vector<std::size_t> sample_steps(samples);
  for (std::size_t k = 0; k < samples; ++k) sample_steps[k] = (k * n) / (samples - 1);
  std::size_t next_sample = 0;

  CVector psi = g_I.amps;
  const auto dim = psi.size();
  CVector k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim), hi(dim), hp(dim);
  const Complex minus_i(0.0, -1.0);

  // k = -i (f H_I + g H_P) x
  auto rhs = [&](double t, const CVector& x, CVector& k) {
    hilbert::apply_into(H_I, x, hi);
    hilbert::apply_into(H_P, x, hp);
    k = minus_i * (sch.f(t) * hi + sch.g(t) * hp);
  };

  for (std::size_t step = 0; step <= n; ++step) {
    if (next_sample < samples && sample_steps[next_sample] == step) {
      sample(static_cast<double>(step) * h, psi);
      ++next_sample;
    }
    if (step == n) break;
    const double t = static_cast<double>(step) * h;
    rhs(t, psi, k1);
    tmp = psi + (0.5 * h) * k1;
    rhs(t + 0.5 * h, tmp, k2);
    tmp = psi + (0.5 * h) * k2;
    rhs(t + 0.5 * h, tmp, k3);
    tmp = psi + h * k3;
    rhs(t + h, tmp, k4);
    psi += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

    const double drift = std::abs(psi.norm() - 1.0);
    res.max_norm_drift = std::max(res.max_norm_drift, drift);
    if (res.max_norm_drift > policy.norm_tol) {
      throw NormDriftError(res.max_norm_drift, 0.5 * h,
                           "norm drift " + std::to_string(res.max_norm_drift) + " exceeds tolerance " +
                               std::to_string(policy.norm_tol) + " at t = " + std::to_string(t + h) +
                               "; try a step below " + std::to_string(0.5 * h));
    }
    if (policy.renormalize) psi.normalize();
  }
  res.final_state = StateVector(g_I.basis, std::move(psi));
  return res;
}

/// evolve() with the rule-chosen step, halved after each NormDriftError up to
/// `max_halvings` times. The h B rule bounds the autonomous part of the RK4
/// error only; fast schedules (large |dH/dt|) can need a smaller step. A
/// policy with fixed_step is run as given.
inline EvolutionResult evolve_refined(const HamiltonianOp& H_I, const HamiltonianOp& H_P, const StateVector& g_I,
                                      const Schedule& sch, const StepPolicy& policy = {},
                                      std::size_t max_halvings = 8) {
  if (policy.fixed_step) return evolve(H_I, H_P, g_I, sch, policy);
  StepPolicy p = policy;
  for (std::size_t k = 0;; ++k) {
    try {
      return evolve(H_I, H_P, g_I, sch, p);
    } catch (const NormDriftError& e) {
      if (k == max_halvings) throw;
      p.fixed_step = e.suggested_step();
    }
  }
}

/// e^{i xi} g_I with xi = -(E_I0 * int f + beta * int g), the exact solution of
/// i d/dt phi = (f H_I + beta g) phi when H_I g_I = E_I0 g_I.
inline StateVector reference_phase_state(const StateVector& g_I, double E_I0, const Schedule& sch, double beta) {
  const double xi = -(E_I0 * integral_f(sch) + beta * schedule_integral(sch));
  return StateVector(g_I.basis, std::polar(1.0, xi) * g_I.amps);
}

/// |<target|psi(T)>|^2
inline double success_probability(const EvolutionResult& res, const StateVector& target) {
  return hilbert::overlap_probability(target, res.final_state);
}

/// Probability mass of psi(T) on a set of basis indices.
inline double success_probability(const EvolutionResult& res, std::span<const std::size_t> indices) {
  double p = 0.0;
  for (std::size_t i : indices) {
    if (i >= res.final_state.dim()) throw InvalidArgument("success_probability: index out of range");
    p += std::norm(res.final_state.amps[static_cast<Eigen::Index>(i)]);
  }
  return p;
}

}  // namespace adiabound::evolution
