#pragma once

#include <Eigen/Dense>

#include <array>
#include <string_view>

namespace memodyn {

inline constexpr int kStateDim = 9;

/// Layout of the augmented state: four circuit states followed by the memory
/// integrals that appear in the Newtonian force formulas.
enum StateIndex : int {
  kX = 0,  ///< x (MMO circuit: the scaled xbar = x / eta)
  kY,
  kZ,
  kW,      ///< memristor internal variable
  kIw,     ///< \int w dt
  kIgG,    ///< \int g(w) dw, accumulated as \int g(w) w' dt
  kIgGt,   ///< \int\int g(w) dw dt
  kIy,     ///< \int y dt
  kIz,     ///< \int z dt
};

inline constexpr std::array<std::string_view, kStateDim> kStateNames = {
    "x", "y", "z", "w", "I_w", "I_gG", "I_gGt", "I_y", "I_z"};

template <typename Scalar>
using AugmentedState = Eigen::Matrix<Scalar, kStateDim, 1>;

template <typename T>
struct CoreState {
  T x{}, y{}, z{}, w{};
};

template <typename Scalar>
CoreState<Scalar> core_of(const AugmentedState<Scalar>& s) {
  return {s(kX), s(kY), s(kZ), s(kW)};
}

/// Augmented state with all memory integrals at zero.
template <typename Scalar>
AugmentedState<Scalar> augment(const CoreState<Scalar>& c) {
  AugmentedState<Scalar> s = AugmentedState<Scalar>::Zero();
  s(kX) = c.x;
  s(kY) = c.y;
  s(kZ) = c.z;
  s(kW) = c.w;
  return s;
}

}  // namespace memodyn
