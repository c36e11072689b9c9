#pragma once

#include "memodyn/error.hpp"
#include "memodyn/polynomial.hpp"

#include <Eigen/Dense>

#include <array>
#include <string>
#include <string_view>

namespace memodyn {

/// The six x-controlled mem-elements y = g(w) x, w' = x.
enum class ElementKind { VCMR, CCMR, QCMC, VCMC, FCML, CCML };

inline constexpr std::array<ElementKind, 6> kAllElementKinds = {
    ElementKind::VCMR, ElementKind::CCMR, ElementKind::QCMC,
    ElementKind::VCMC, ElementKind::FCML, ElementKind::CCML};

/// Physical meaning of (y, x, w) for a kind: "v", "i", "q", "phi", "TIQ", "TIF".
struct ElementRoles {
  std::string_view y, x, w;
};

constexpr ElementRoles roles(ElementKind kind) {
  switch (kind) {
    case ElementKind::VCMR: return {"i", "v", "phi"};
    case ElementKind::CCMR: return {"v", "i", "q"};
    case ElementKind::QCMC: return {"v", "q", "TIQ"};
    case ElementKind::VCMC: return {"q", "v", "phi"};
    case ElementKind::FCML: return {"i", "phi", "TIF"};
    case ElementKind::CCML: return {"phi", "i", "q"};
  }
  return {"", "", ""};
}

constexpr std::string_view to_string(ElementKind kind) {
  switch (kind) {
    case ElementKind::VCMR: return "VCMR";
    case ElementKind::CCMR: return "CCMR";
    case ElementKind::QCMC: return "QCMC";
    case ElementKind::VCMC: return "VCMC";
    case ElementKind::FCML: return "FCML";
    case ElementKind::CCML: return "CCML";
  }
  return "?";
}

inline ElementKind parse_element_kind(std::string_view name) {
  for (ElementKind k : kAllElementKinds)
    if (to_string(k) == name) return k;
  fail_validation("unknown mem-element kind '" + std::string(name) + "'");
}

/// The polynomial stored here is the one multiplying x in y = g(w) x, for
/// reciprocal kinds (VCMR, QCMC, FCML) as well; M(.) is never stored.
template <typename Scalar>
struct MemElementSpec {
  ElementKind kind = ElementKind::VCMR;
  Polynomial<Scalar> g;
};

template <typename Scalar>
Scalar eval_g(const MemElementSpec<Scalar>& spec, Scalar w) {
  return spec.g(w);
}

/// G(w) with G(0) = 0.
template <typename Scalar>
Scalar eval_G(const MemElementSpec<Scalar>& spec, Scalar w) {
  return spec.g.antiderivative(w);
}

template <typename Scalar>
struct ElementResponse {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> w;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> y;
};

namespace detail {

// Cubic (Lagrange) estimate of the input at the midpoint of interval [i, i+1].
template <typename Vec>
typename Vec::Scalar midpoint_value(const Vec& x, Eigen::Index i) {
  using S = typename Vec::Scalar;
  const Eigen::Index n = x.size();
  if (n == 2) return S(0.5) * (x(0) + x(1));
  if (n == 3) {
    return i == 0 ? S(0.375) * x(0) + S(0.75) * x(1) - S(0.125) * x(2)
                  : S(-0.125) * x(0) + S(0.75) * x(1) + S(0.375) * x(2);
  }
  if (i == 0) return (S(5) * x(0) + S(15) * x(1) - S(5) * x(2) + x(3)) / S(16);
  if (i == n - 2) return (x(n - 4) - S(5) * x(n - 3) + S(15) * x(n - 2) + S(5) * x(n - 1)) / S(16);
  return (S(9) * (x(i) + x(i + 1)) - x(i - 1) - x(i + 2)) / S(16);
}

}  // namespace detail

/// Drives a mem-element with a uniformly sampled input x(t).
///
/// w integrates x with the classical RK4 step (the integrator's fixed-step
/// rule), taking x at half steps from the cubic interpolant of the samples.
/// y = g(w) x pointwise.
template <typename Scalar, typename Derived>
ElementResponse<Scalar> simulate_element(const MemElementSpec<Scalar>& spec,
                                         const Eigen::MatrixBase<Derived>& input, Scalar dt,
                                         Scalar w0) {
  if (input.size() == 0) fail_validation("empty waveform");
  if (!(dt > Scalar(0))) fail_validation("sample step must be positive");
  const Eigen::Matrix<Scalar, Eigen::Dynamic, 1> x = input;
  const Eigen::Index n = x.size();

  ElementResponse<Scalar> out;
  out.w.resize(n);
  out.y.resize(n);
  out.w(0) = w0;
  for (Eigen::Index i = 0; i + 1 < n; ++i) {
    const Scalar mid = detail::midpoint_value(x, i);
    out.w(i + 1) = out.w(i) + dt / Scalar(6) * (x(i) + Scalar(4) * mid + x(i + 1));
  }
  for (Eigen::Index i = 0; i < n; ++i) out.y(i) = eval_g(spec, out.w(i)) * x(i);
  return out;
}

}  // namespace memodyn
