#pragma once

// Structured Hamiltonians applied matrix-free.
//
//   Diagonal             H = diag(values)
//   ProjectorComplement  H = 1 - |v><v|
//   CoherentQuadratic    H = (a^dag - conj(alpha)) (a - alpha) on a Fock basis cut at n_max
//   ModeSum              H = sum_i (a_i^dag - conj(alpha_i)) (a_i - alpha_i)
//
// The truncated ladder operators keep a^dag a = diag(0..n_max) exactly, so the
// truncated CoherentQuadratic is B^dag B with B = a - alpha and stays positive
// semidefinite.

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <complex>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "adiabound/errors.hpp"
#include "adiabound/hilbert/state.hpp"

namespace adiabound::hilbert {

struct Diagonal {
  BasisSpec basis;
  Eigen::VectorXd values;

  Diagonal(BasisSpec b, Eigen::VectorXd v) : basis(b), values(std::move(v)) {
    if (static_cast<std::size_t>(values.size()) != basis.dim()) throw InvalidArgument("Diagonal: size mismatch");
  }
  explicit Diagonal(Eigen::VectorXd v) : basis(BasisSpec::flat(static_cast<std::size_t>(v.size()))), values(std::move(v)) {}
};

struct ProjectorComplement {
  StateVector v;

  explicit ProjectorComplement(StateVector vec) : v(std::move(vec)) {
    if (!v.is_normalized()) throw InvalidArgument("ProjectorComplement: vector must be normalized");
  }
};

struct CoherentQuadratic {
  Complex alpha;
  std::size_t n_max;
};

struct ModeSum {
  std::vector<CoherentQuadratic> terms;

  explicit ModeSum(std::vector<CoherentQuadratic> t) : terms(std::move(t)) {
    if (terms.empty()) throw InvalidArgument("ModeSum: no modes");
    for (const auto& term : terms) {
      if (term.n_max != terms.front().n_max) throw InvalidArgument("ModeSum: modes must share n_max");
    }
  }
};

using HamiltonianOp = std::variant<Diagonal, ProjectorComplement, CoherentQuadratic, ModeSum>;

inline BasisSpec basis_of(const HamiltonianOp& H) {
  struct Visitor {
    BasisSpec operator()(const Diagonal& d) const { return d.basis; }
    BasisSpec operator()(const ProjectorComplement& p) const { return p.v.basis; }
    BasisSpec operator()(const CoherentQuadratic& c) const { return BasisSpec::fock(c.n_max); }
    BasisSpec operator()(const ModeSum& m) const {
      return BasisSpec::modes(m.terms.front().n_max + 1, m.terms.size());
    }
  };
  return std::visit(Visitor{}, H);
}

namespace detail {

// y += (a^dag - conj(alpha))(a - alpha) x along one mode of a Kronecker layout:
// element (outer, n, inner) sits at outer * dim * stride + n * stride + inner.
inline void add_coherent_quadratic(const CoherentQuadratic& term, const Complex* x, Complex* y,
                                   std::size_t total, std::size_t stride) {
  const std::size_t dim = term.n_max + 1;
  const Complex alpha = term.alpha;
  const Complex alpha_c = std::conj(alpha);
  const double a2 = std::norm(alpha);
  const std::size_t block = dim * stride;
  for (std::size_t outer = 0; outer < total; outer += block) {
    for (std::size_t n = 0; n < dim; ++n) {
      const double dn = static_cast<double>(n);
      const double sq_n = std::sqrt(dn);
      const double sq_n1 = std::sqrt(dn + 1.0);
      const Complex* xn = x + outer + n * stride;
      Complex* yn = y + outer + n * stride;
      for (std::size_t in = 0; in < stride; ++in) {
        Complex acc = (dn + a2) * xn[in];
        if (n > 0) acc -= alpha * sq_n * xn[in - stride];
        if (n + 1 < dim) acc -= alpha_c * sq_n1 * xn[in + stride];
        yn[in] += acc;
      }
    }
  }
}

}  // namespace detail

/// y = H x on raw amplitude vectors of matching dimension.
inline void apply_into(const HamiltonianOp& H, const CVector& x, CVector& y) {
  y.resize(x.size());
  struct Visitor {
    const CVector& x;
    CVector& y;
    void operator()(const Diagonal& d) const { y = d.values.cast<Complex>().cwiseProduct(x); }
    void operator()(const ProjectorComplement& p) const {
      const Complex c = p.v.amps.dot(x);
      y = x - c * p.v.amps;
    }
    void operator()(const CoherentQuadratic& c) const {
      y.setZero();
      detail::add_coherent_quadratic(c, x.data(), y.data(), static_cast<std::size_t>(x.size()), 1);
    }
    void operator()(const ModeSum& m) const {
      y.setZero();
      std::size_t stride = 1;
      for (const auto& term : m.terms) {
        detail::add_coherent_quadratic(term, x.data(), y.data(), static_cast<std::size_t>(x.size()), stride);
        stride *= term.n_max + 1;
      }
    }
  };
  std::visit(Visitor{x, y}, H);
}

/// H psi, unnormalized.
inline StateVector apply(const HamiltonianOp& H, const StateVector& psi) {
  require_same_basis(basis_of(H), psi.basis, "apply");
  CVector y;
  apply_into(H, psi.amps, y);
  return {psi.basis, std::move(y)};
}

/// Certified upper bound on the operator norm.
inline double norm_bound(const HamiltonianOp& H) {
  struct Visitor {
    double operator()(const Diagonal& d) const { return d.values.cwiseAbs().maxCoeff(); }
    double operator()(const ProjectorComplement&) const { return 1.0; }
    double operator()(const CoherentQuadratic& c) const {
      const double r = std::sqrt(static_cast<double>(c.n_max)) + std::abs(c.alpha);
      return r * r;
    }
    double operator()(const ModeSum& m) const {
      double b = 0.0;
      for (const auto& t : m.terms) b += (*this)(t);
      return b;
    }
  };
  return std::visit(Visitor{}, H);
}

/// Dense matrix built column by column from the matrix-free action.
inline Eigen::MatrixXcd to_dense(const HamiltonianOp& H) {
  const auto n = static_cast<Eigen::Index>(basis_of(H).dim());
  Eigen::MatrixXcd out(n, n);
  CVector e = CVector::Zero(n);
  CVector col;
  for (Eigen::Index j = 0; j < n; ++j) {
    e[j] = 1.0;
    apply_into(H, e, col);
    out.col(j) = col;
    e[j] = 0.0;
  }
  return out;
}

/// Sum of (coefficient, operator) terms over a shared basis, e.g. f H_I + g H_P.
class OperatorSum {
 public:
  OperatorSum(std::vector<std::pair<double, const HamiltonianOp*>> terms) : terms_(std::move(terms)) {
    if (terms_.empty()) throw InvalidArgument("OperatorSum: no terms");
    basis_ = basis_of(*terms_.front().second);
    for (const auto& [c, op] : terms_) require_same_basis(basis_, basis_of(*op), "OperatorSum");
  }

  const BasisSpec& basis() const noexcept { return basis_; }

  void apply_into(const CVector& x, CVector& y) const {
    y = CVector::Zero(x.size());
    for (const auto& [c, op] : terms_) {
      if (c == 0.0) continue;
      hilbert::apply_into(*op, x, scratch_);
      y += c * scratch_;
    }
  }

  double norm_bound() const {
    double b = 0.0;
    for (const auto& [c, op] : terms_) b += std::abs(c) * hilbert::norm_bound(*op);
    return b;
  }

 private:
  std::vector<std::pair<double, const HamiltonianOp*>> terms_;
  BasisSpec basis_;
  mutable CVector scratch_;
};

}  // namespace adiabound::hilbert
