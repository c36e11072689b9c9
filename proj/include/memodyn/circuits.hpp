#pragma once

#include "memodyn/error.hpp"
#include "memodyn/polynomial.hpp"
#include "memodyn/state.hpp"

#include <string_view>
#include <variant>

namespace memodyn {

// Parameter records. Defaults are demo starting points, not published values.

/// Regular Chua circuit with a flux-controlled memristor; h(w) = xi - 1 - g(w).
struct RegularChuaParams {
  double k = 1.0;
  double alpha = 2.0;  ///< 1/C1
  double beta = 1.5;   ///< 1/L
  double gamma = 0.3;  ///< r/L
  double xi = 1.2;     ///< G
  Polynomial<double> g = quadratic_memductance(-0.5, 0.1);
};

/// Canonical Chua circuit with a flux-controlled memristor.
struct CanonicalChuaParams {
  double k = 1.0;
  double alpha = 2.0;  ///< 1/C1
  double beta = 1.5;   ///< 1/C2
  double gamma = 0.3;  ///< G/C2
  Polynomial<double> g = quadratic_memductance(-0.5, 0.1);
};

/// Singularly perturbed four-state system shared by both MMO circuits.
///
/// Version 1 (memductor voltage as x): epsilon = C1, alpha = 1/L, K = R,
/// beta = gamma/C2. Version 2 (dual, memristor current as x): epsilon = L1,
/// alpha = 1/C, K = G, beta = gamma/L2. One model serves both.
struct MmoParams {
  double epsilon = 0.01;
  double alpha = 1.0;
  double K = 1.0;
  double beta = 1.0;
  double eta = 10.0;  ///< state scaling, xbar = x / eta
  double s_c = 1.0;   ///< time scaling
  double a_s = 0.01;  ///< bias source, sign included
  Polynomial<double> g = quadratic_memductance(-0.1, 0.1);
};

using CircuitModel = std::variant<RegularChuaParams, CanonicalChuaParams, MmoParams>;

inline void validate(const RegularChuaParams& p) {
  if (!(p.k > 0)) fail_validation("k must be positive");
}
inline void validate(const CanonicalChuaParams& p) {
  if (!(p.k > 0)) fail_validation("k must be positive");
}
inline void validate(const MmoParams& p) {
  if (!(p.epsilon > 0)) fail_validation("singular parameter must be positive");
  if (!(p.s_c > 0)) fail_validation("time scaling s_c must be positive");
  if (!(p.eta >= 1)) fail_validation("scaling eta must be >= 1");
}
inline void validate(const CircuitModel& m) {
  std::visit([](const auto& p) { validate(p); }, m);
}

inline std::string_view model_name(const CircuitModel& m) {
  switch (m.index()) {
    case 0: return "regular_chua";
    case 1: return "canonical_chua";
    default: return "mmo";
  }
}

inline const Polynomial<double>& memductance(const CircuitModel& m) {
  return std::visit([](const auto& p) -> const Polynomial<double>& { return p.g; }, m);
}

/// Factor c with w' = c * x_stored.
inline double internal_rate_scale(const CircuitModel& m) {
  if (const auto* p = std::get_if<MmoParams>(&m)) return p->s_c * p->eta;
  return std::visit([](const auto& p) {
    if constexpr (requires { p.k; }) return p.k;
    else return 1.0;
  }, m);
}

/// Physical x from the stored state (only the MMO model scales it).
inline double physical_x(const CircuitModel& m, double stored_x) {
  if (const auto* p = std::get_if<MmoParams>(&m)) return p->eta * stored_x;
  return stored_x;
}

// Core right-hand sides, generic over the state scalar (double, long double,
// Taylor series).

template <typename T>
CoreState<T> core_rhs(const RegularChuaParams& p, const CoreState<T>& s) {
  const T gw = p.g(s.w);
  return {p.k * p.alpha * (s.y + (p.xi - 1.0) * s.x - gw * s.x),
          p.k * (s.x - s.y + s.z),
          -p.k * (p.beta * s.y + p.gamma * s.z),
          p.k * s.x};
}

// z' = k(gamma z - beta y): the sign under which the canonical circuit's
// Newtonian force and jounce equation hold.
template <typename T>
CoreState<T> core_rhs(const CanonicalChuaParams& p, const CoreState<T>& s) {
  const T gw = p.g(s.w);
  return {p.k * p.alpha * (s.y - gw * s.x),
          p.k * (s.z - s.x),
          p.k * (p.gamma * s.z - p.beta * s.y),
          p.k * s.x};
}

template <typename T>
CoreState<T> core_rhs(const MmoParams& p, const CoreState<T>& s) {
  const T gw = p.g(s.w);
  return {(p.s_c / p.epsilon) * (-(s.y / p.eta) - gw * s.x),
          p.s_c * p.alpha * (p.eta * s.x - p.K * s.y - s.z + p.a_s),
          -p.s_c * p.beta * s.y,
          p.s_c * p.eta * s.x};
}

template <typename T>
CoreState<T> core_rhs(const CircuitModel& m, const CoreState<T>& s) {
  return std::visit([&](const auto& p) { return core_rhs(p, s); }, m);
}

namespace detail {

template <typename Scalar, typename Params>
AugmentedState<Scalar> augmented_rhs(const Params& p, const AugmentedState<Scalar>& s) {
  const CoreState<Scalar> d = core_rhs(p, core_of(s));
  AugmentedState<Scalar> ds;
  ds(kX) = d.x;
  ds(kY) = d.y;
  ds(kZ) = d.z;
  ds(kW) = d.w;
  ds(kIw) = s(kW);
  ds(kIgG) = p.g(s(kW)) * d.w;
  ds(kIgGt) = s(kIgG);
  ds(kIy) = s(kY);
  ds(kIz) = s(kZ);
  return ds;
}

}  // namespace detail

/// Derivative of the augmented state for the regular Chua circuit.
template <typename Scalar>
AugmentedState<Scalar> rhs_regular_chua(Scalar /*t*/, const AugmentedState<Scalar>& s,
                                        const RegularChuaParams& p) {
  return detail::augmented_rhs(p, s);
}

template <typename Scalar>
AugmentedState<Scalar> rhs_canonical_chua(Scalar /*t*/, const AugmentedState<Scalar>& s,
                                          const CanonicalChuaParams& p) {
  return detail::augmented_rhs(p, s);
}

/// Throws on a non-positive singular parameter.
template <typename Scalar>
AugmentedState<Scalar> rhs_mmo(Scalar /*t*/, const AugmentedState<Scalar>& s, const MmoParams& p) {
  if (!(p.epsilon > 0)) fail_validation("singular parameter must be positive");
  return detail::augmented_rhs(p, s);
}

template <typename Scalar>
AugmentedState<Scalar> rhs(const CircuitModel& m, Scalar t, const AugmentedState<Scalar>& s) {
  return std::visit(
      [&](const auto& p) -> AugmentedState<Scalar> {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, RegularChuaParams>) return rhs_regular_chua(t, s, p);
        else if constexpr (std::is_same_v<P, CanonicalChuaParams>) return rhs_canonical_chua(t, s, p);
        else return rhs_mmo(t, s, p);
      },
      m);
}

}  // namespace memodyn
