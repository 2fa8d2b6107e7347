#pragma once

#include <cmath>
#include <complex>
#include <cstddef>
#include <string>

#include "adiabound/errors.hpp"
#include "adiabound/hilbert/state.hpp"

namespace adiabound::hilbert {

inline constexpr double kDefaultTailTol = 1e-10;

/// ceil(|alpha|^2 + 10 |alpha| + 10)
inline std::size_t default_n_max(Complex alpha) {
  const double r = std::abs(alpha);
  return static_cast<std::size_t>(std::ceil(r * r + 10.0 * r + 10.0));
}

namespace detail {

inline double log_poisson(double lambda, std::size_t n) {
  if (lambda == 0.0) return n == 0 ? 0.0 : -INFINITY;
  const double dn = static_cast<double>(n);
  return -lambda + dn * std::log(lambda) - std::lgamma(dn + 1.0);
}

// Poisson mass strictly above n_max, summed directly (no 1 - captured cancellation).
inline double poisson_tail(double lambda, std::size_t n_max) {
  if (lambda == 0.0) return 0.0;
  double tail = 0.0;
  for (std::size_t n = n_max + 1;; ++n) {
    const double p = std::exp(log_poisson(lambda, n));
    tail += p;
    if (static_cast<double>(n) > lambda && (p == 0.0 || p < 1e-18 * tail)) break;
  }
  return tail;
}

}  // namespace detail

/// Smallest n_max whose Poisson tail above it is below tail_tol.
inline std::size_t minimal_n_max(Complex alpha, double tail_tol) {
  const double lambda = std::norm(alpha);
  std::size_t n = static_cast<std::size_t>(std::floor(lambda));
  while (detail::poisson_tail(lambda, n) >= tail_tol) ++n;
  while (n > 1 && detail::poisson_tail(lambda, n - 1) < tail_tol) --n;
  return std::max<std::size_t>(n, 1);
}

struct CoherentState {
  StateVector state;
  double captured_mass = 1.0;    ///< sum_{n <= n_max} of the Poisson weights
  double tail_mass = 0.0;        ///< sum_{n > n_max}
  double renormalization = 1.0;  ///< factor applied to the truncated amplitudes
};

/// |alpha> = e^{-|alpha|^2/2} sum_n alpha^n / sqrt(n!) |n>, truncated at n_max and renormalized.
inline CoherentState coherent_state(Complex alpha, std::size_t n_max, double tail_tol = kDefaultTailTol) {
  const double lambda = std::norm(alpha);
  const double tail = detail::poisson_tail(lambda, n_max);
  if (!(tail < tail_tol)) {
    const std::size_t need = minimal_n_max(alpha, tail_tol);
    throw TruncationError(need, "coherent state with |alpha|^2 = " + std::to_string(lambda) + ": n_max = " +
                                    std::to_string(n_max) + " leaves tail mass " + std::to_string(tail) +
                                    "; need n_max >= " + std::to_string(need));
  }
  const BasisSpec basis = BasisSpec::fock(n_max);
  CVector amps = CVector::Zero(static_cast<Eigen::Index>(n_max + 1));
  double captured = 0.0;
  const double phase = std::arg(alpha);
  for (std::size_t n = 0; n <= n_max; ++n) {
    const double lp = detail::log_poisson(lambda, n);
    captured += std::exp(lp);
    amps[static_cast<Eigen::Index>(n)] = std::polar(std::exp(0.5 * lp), phase * static_cast<double>(n));
  }
  const double norm = amps.norm();
  amps /= norm;
  return {StateVector(basis, std::move(amps)), captured, tail, 1.0 / norm};
}

inline CoherentState coherent_state(Complex alpha) { return coherent_state(alpha, default_n_max(alpha)); }

}  // namespace adiabound::hilbert
