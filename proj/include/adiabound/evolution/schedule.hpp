#pragma once

// Interpolation schedules H(t) = f(t) H_I + g(t) H_P on [0, T], with
// f(0) = g(T) = 1 and f(T) = g(0) = 0. All kinds are functions of u = t/T.
//
//   linear                  f = 1 - u, g = u
//   das_wei(N)              f = 1 - u, g = u + sqrt(N) u (1 - u)
//   local_adiabatic_grover  f = 1 - s(u), g = s(u), with ds/dt proportional to
//                           the Grover gap^2 = 1 - 4 (1 - 1/N) s (1 - s):
//                           s(u) = 1/2 + tan((2u - 1) atan(sqrt(N-1))) / (2 sqrt(N-1))

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <cstddef>
#include <string>

#include "adiabound/errors.hpp"

namespace adiabound::evolution {

class Schedule {
 public:
  enum class Kind { linear, das_wei, local_adiabatic_grover };

  static Schedule linear(double T) { return Schedule(Kind::linear, 0, T); }

  static Schedule das_wei(std::size_t N, double T) {
    if (N < 2) throw InvalidArgument("das_wei schedule needs N >= 2");
    return Schedule(Kind::das_wei, N, T);
  }

  static Schedule local_adiabatic_grover(std::size_t N, double T) {
    if (N < 2) throw InvalidArgument("local adiabatic schedule needs N >= 2");
    return Schedule(Kind::local_adiabatic_grover, N, T);
  }

  /// Local adiabatic schedule whose duration follows from the rate constant:
  /// T = N atan(sqrt(N-1)) / (epsilon sqrt(N-1)).
  static Schedule local_adiabatic_grover_rate(std::size_t N, double epsilon) {
    if (!(epsilon > 0.0)) throw InvalidArgument("local adiabatic schedule needs epsilon > 0");
    if (N < 2) throw InvalidArgument("local adiabatic schedule needs N >= 2");
    const double r = std::sqrt(static_cast<double>(N) - 1.0);
    return local_adiabatic_grover(N, static_cast<double>(N) * std::atan(r) / (epsilon * r));
  }

  Kind kind() const noexcept { return kind_; }
  std::size_t N() const noexcept { return N_; }
  double T() const noexcept { return T_; }

  /// Same family, different duration.
  Schedule with_duration(double T) const { return Schedule(kind_, N_, T); }

  /// Rate constant of the local adiabatic kind (0 otherwise).
  double epsilon() const {
    if (kind_ != Kind::local_adiabatic_grover || T_ == 0.0) return 0.0;
    const double r = std::sqrt(static_cast<double>(N_) - 1.0);
    return static_cast<double>(N_) * std::atan(r) / (r * T_);
  }

  double f(double t) const { return f_unit(unit(t)); }
  double g(double t) const { return g_unit(unit(t)); }

  double f_unit(double u) const {
    if (kind_ == Kind::local_adiabatic_grover) return 1.0 - local_s(u);
    return 1.0 - u;
  }

  double g_unit(double u) const {
    switch (kind_) {
      case Kind::linear: return u;
      case Kind::das_wei: return u + std::sqrt(static_cast<double>(N_)) * u * (1.0 - u);
      case Kind::local_adiabatic_grover: return local_s(u);
    }
    return 0.0;
  }

  double max_f() const { return 1.0; }

  /// das_wei peaks at u = (1 + 1/sqrt N)/2 with g = (sqrt N + 1)^2 / (4 sqrt N).
  double max_g() const {
    if (kind_ != Kind::das_wei) return 1.0;
    const double r = std::sqrt(static_cast<double>(N_));
    return (r + 1.0) * (r + 1.0) / (4.0 * r);
  }

  /// True when schedule_integral has a closed form for this kind.
  bool has_closed_form() const noexcept { return kind_ != Kind::local_adiabatic_grover; }

 private:
  Schedule(Kind k, std::size_t N, double T) : kind_(k), N_(N), T_(T) {
    if (!(T >= 0.0) || !std::isfinite(T)) throw InvalidArgument("schedule duration must be finite and >= 0");
  }

  double unit(double t) const { return T_ > 0.0 ? t / T_ : 0.0; }

  double local_s(double u) const {
    const double r = std::sqrt(static_cast<double>(N_) - 1.0);
    return 0.5 + std::tan((2.0 * u - 1.0) * std::atan(r)) / (2.0 * r);
  }

  Kind kind_;
  std::size_t N_;
  double T_;
};

inline const char* to_string(Schedule::Kind k) {
  switch (k) {
    case Schedule::Kind::linear: return "linear";
    case Schedule::Kind::das_wei: return "das_wei";
    case Schedule::Kind::local_adiabatic_grover: return "local_adiabatic";
  }
  return "?";
}

inline Schedule::Kind schedule_kind_from_string(const std::string& s) {
  if (s == "linear") return Schedule::Kind::linear;
  if (s == "das_wei") return Schedule::Kind::das_wei;
  if (s == "local_adiabatic") return Schedule::Kind::local_adiabatic_grover;
  throw InvalidArgument("unknown schedule kind '" + s + "'");
}

inline Schedule make_schedule(Schedule::Kind kind, std::size_t N, double T) {
  switch (kind) {
    case Schedule::Kind::linear: return Schedule::linear(T);
    case Schedule::Kind::das_wei: return Schedule::das_wei(N, T);
    case Schedule::Kind::local_adiabatic_grover: return Schedule::local_adiabatic_grover(N, T);
  }
  throw InvalidArgument("unknown schedule kind");
}

/// Adaptive Gauss-Kronrod integral of g over [0, T], relative tolerance 1e-10.
inline double integral_g_quadrature(const Schedule& s) {
  if (s.T() == 0.0) return 0.0;
  auto gu = [&](double u) { return s.g_unit(u); };
  return s.T() * boost::math::quadrature::gauss_kronrod<double, 31>::integrate(gu, 0.0, 1.0, 15, 1e-10);
}

inline double integral_f_quadrature(const Schedule& s) {
  if (s.T() == 0.0) return 0.0;
  auto fu = [&](double u) { return s.f_unit(u); };
  return s.T() * boost::math::quadrature::gauss_kronrod<double, 31>::integrate(fu, 0.0, 1.0, 15, 1e-10);
}

/// Integral of g over [0, T]: linear T/2, das_wei T (1/2 + sqrt(N)/6), quadrature otherwise.
inline double schedule_integral(const Schedule& s) {
  switch (s.kind()) {
    case Schedule::Kind::linear: return 0.5 * s.T();
    case Schedule::Kind::das_wei: return s.T() * (0.5 + std::sqrt(static_cast<double>(s.N())) / 6.0);
    case Schedule::Kind::local_adiabatic_grover: return integral_g_quadrature(s);
  }
  return 0.0;
}

inline double integral_f(const Schedule& s) {
  if (s.kind() != Schedule::Kind::local_adiabatic_grover) return 0.5 * s.T();
  return integral_f_quadrature(s);
}

}  // namespace adiabound::evolution
