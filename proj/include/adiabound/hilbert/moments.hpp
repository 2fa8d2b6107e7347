#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "adiabound/errors.hpp"
#include "adiabound/hilbert/hamiltonian.hpp"
#include "adiabound/hilbert/state.hpp"

namespace adiabound::hilbert {

inline constexpr double kNormTol = 1e-10;
inline constexpr double kImagTol = 1e-10;

namespace detail {

inline void require_normalized(const StateVector& psi, const char* where) {
  if (!psi.is_normalized(kNormTol)) {
    throw InvalidArgument(std::string(where) + ": state is not normalized (norm " + std::to_string(psi.norm()) + ")");
  }
}

}  // namespace detail

/// <psi|H|psi>. Throws if the imaginary residue exceeds 1e-10 relative to |<H>|.
inline double expectation(const HamiltonianOp& H, const StateVector& psi) {
  detail::require_normalized(psi, "expectation");
  const StateVector h = hilbert::apply(H, psi);
  const Complex e = psi.amps.dot(h.amps);
  if (std::abs(e.imag()) > kImagTol * std::max(1.0, std::abs(e.real()))) {
    throw InvalidArgument("expectation: operator is not Hermitian on this state (imaginary part " +
                          std::to_string(e.imag()) + ")");
  }
  return e.real();
}

/// ||(H - beta) psi||
inline double shifted_norm(const HamiltonianOp& H, const StateVector& psi, double beta) {
  const StateVector h = hilbert::apply(H, psi);
  return (h.amps - beta * psi.amps).norm();
}

/// <H^2> - <H>^2, evaluated as ||(H - <H>) psi||^2 to avoid cancellation.
inline double variance(const HamiltonianOp& H, const StateVector& psi) {
  const double mean = expectation(H, psi);
  const double s = shifted_norm(H, psi, mean);
  return std::max(0.0, s * s);
}

}  // namespace adiabound::hilbert
