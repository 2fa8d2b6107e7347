#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <complex>
#include <cstddef>
#include <ostream>
#include <span>
#include <string>
#include <vector>

#include "adiabound/errors.hpp"

namespace adiabound::hilbert {

using Complex = std::complex<double>;
using CVector = Eigen::VectorXcd;

/// Labeled basis. Every kind is `modes` copies of a `mode_dim`-level system;
/// flat and fock are the single-mode cases. Multi-indices are little-endian:
/// mode 0 is the fastest-varying digit of the flat index.
struct BasisSpec {
  enum class Kind { flat, fock, modes };

  Kind kind = Kind::flat;
  std::size_t mode_dim = 2;
  std::size_t mode_count = 1;

  static BasisSpec flat(std::size_t n) { return checked({Kind::flat, n, 1}); }
  static BasisSpec fock(std::size_t n_max) { return checked({Kind::fock, n_max + 1, 1}); }
  static BasisSpec modes(std::size_t per_mode_dim, std::size_t count) {
    return checked({Kind::modes, per_mode_dim, count});
  }

  std::size_t dim() const noexcept {
    std::size_t d = 1;
    for (std::size_t i = 0; i < mode_count; ++i) d *= mode_dim;
    return d;
  }

  std::vector<std::size_t> multi_index(std::size_t flat_index) const {
    if (flat_index >= dim()) throw InvalidArgument("basis index out of range");
    std::vector<std::size_t> m(mode_count);
    for (auto& digit : m) {
      digit = flat_index % mode_dim;
      flat_index /= mode_dim;
    }
    return m;
  }

  std::size_t flat_index(std::span<const std::size_t> m) const {
    if (m.size() != mode_count) throw InvalidArgument("multi-index has wrong mode count");
    std::size_t idx = 0;
    for (std::size_t i = mode_count; i-- > 0;) {
      if (m[i] >= mode_dim) throw InvalidArgument("multi-index digit out of range");
      idx = idx * mode_dim + m[i];
    }
    return idx;
  }

  friend bool operator==(const BasisSpec&, const BasisSpec&) = default;

 private:
  static BasisSpec checked(BasisSpec b) {
    if (b.mode_dim < 1 || b.mode_count < 1) throw InvalidArgument("empty basis");
    constexpr std::size_t kMaxDim = std::size_t{1} << 26;
    double approx = std::pow(static_cast<double>(b.mode_dim), static_cast<double>(b.mode_count));
    if (approx > static_cast<double>(kMaxDim)) {
      throw BudgetExceeded("basis dimension " + std::to_string(approx) + " exceeds " + std::to_string(kMaxDim));
    }
    if (b.dim() < 2) throw InvalidArgument("basis dimension must be at least 2");
    return b;
  }
};

inline std::string to_string(const BasisSpec& b) {
  switch (b.kind) {
    case BasisSpec::Kind::flat: return "flat(" + std::to_string(b.mode_dim) + ")";
    case BasisSpec::Kind::fock: return "fock(" + std::to_string(b.mode_dim - 1) + ")";
    case BasisSpec::Kind::modes:
      return "modes(" + std::to_string(b.mode_dim) + "^" + std::to_string(b.mode_count) + ")";
  }
  return "?";
}

/// Amplitudes over a basis. Physical states have unit norm; results of
/// applying an operator, or differences of states, generally do not.
struct StateVector {
  BasisSpec basis;
  CVector amps;

  StateVector(BasisSpec b, CVector a) : basis(b), amps(std::move(a)) {
    if (static_cast<std::size_t>(amps.size()) != basis.dim()) {
      throw InvalidArgument("amplitude count " + std::to_string(amps.size()) + " != basis dimension " +
                            std::to_string(basis.dim()));
    }
  }

  std::size_t dim() const noexcept { return basis.dim(); }
  double norm() const { return amps.norm(); }
  bool is_normalized(double tol = 1e-10) const { return std::abs(amps.norm() - 1.0) <= tol; }
};

inline void require_same_basis(const BasisSpec& a, const BasisSpec& b, const char* where) {
  if (!(a == b)) {
    throw InvalidArgument(std::string(where) + ": basis mismatch " + to_string(a) + " vs " + to_string(b));
  }
}

inline StateVector basis_state(const BasisSpec& b, std::size_t index) {
  if (index >= b.dim()) throw InvalidArgument("basis_state index out of range");
  CVector v = CVector::Zero(static_cast<Eigen::Index>(b.dim()));
  v[static_cast<Eigen::Index>(index)] = 1.0;
  return {b, std::move(v)};
}

inline StateVector uniform_state(const BasisSpec& b) {
  const auto n = static_cast<Eigen::Index>(b.dim());
  return {b, CVector::Constant(n, Complex(1.0 / std::sqrt(static_cast<double>(n)), 0.0))};
}

inline StateVector normalized(StateVector s) {
  const double n = s.norm();
  if (n == 0.0) throw InvalidArgument("cannot normalize the zero vector");
  s.amps /= n;
  return s;
}

/// <a|b>
inline Complex inner(const StateVector& a, const StateVector& b) {
  require_same_basis(a.basis, b.basis, "inner");
  return a.amps.dot(b.amps);
}

inline double overlap_probability(const StateVector& a, const StateVector& b) { return std::norm(inner(a, b)); }

/// Tensor product of single-mode states with equal dimension; factor i is mode i.
inline StateVector tensor_product(std::span<const StateVector> factors) {
  if (factors.empty()) throw InvalidArgument("tensor_product of nothing");
  const std::size_t d = factors.front().dim();
  for (const auto& f : factors) {
    if (f.dim() != d || f.basis.mode_count != 1) throw InvalidArgument("tensor_product: factors must be single-mode of equal dimension");
  }
  const BasisSpec b = BasisSpec::modes(d, factors.size());
  CVector out(static_cast<Eigen::Index>(b.dim()));
  out[0] = 1.0;
  Eigen::Index filled = 1;
  // Mode i multiplies in as the next most significant digit.
  for (const auto& f : factors) {
    for (Eigen::Index k = static_cast<Eigen::Index>(d); k-- > 0;) {
      out.segment(k * filled, filled) = out.head(filled) * f.amps[k];
    }
    filled *= static_cast<Eigen::Index>(d);
  }
  return {b, std::move(out)};
}

/// Debug dump: one "index re im" line per amplitude.
inline void write_dump(std::ostream& os, const StateVector& s) {
  os.precision(17);
  for (Eigen::Index i = 0; i < s.amps.size(); ++i) {
    os << i << ' ' << s.amps[i].real() << ' ' << s.amps[i].imag() << '\n';
  }
}

}  // namespace adiabound::hilbert
