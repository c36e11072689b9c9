#pragma once

#include <Eigen/Dense>

#include <algorithm>
#include <array>
#include <cmath>

namespace memodyn {

/// Value at time t of a series sampled on the uniform grid t0 + i*dt, using
/// the 4-point Lagrange cubic around t (one-sided near the ends). Exact at
/// the nodes and for cubic data.
template <typename Derived>
typename Derived::Scalar interpolate_uniform(const Eigen::MatrixBase<Derived>& v,
                                             typename Derived::Scalar t0,
                                             typename Derived::Scalar dt,
                                             typename Derived::Scalar t) {
  using S = typename Derived::Scalar;
  const Eigen::Index n = v.size();
  if (n == 1) return v(0);
  const S u = (t - t0) / dt;
  Eigen::Index i = static_cast<Eigen::Index>(std::floor(u));
  i = std::clamp<Eigen::Index>(i, 0, n - 2);
  const S frac = u - S(i);
  const S snap = S(1e-12);
  if (std::abs(frac) < snap) return v(i);
  if (std::abs(frac - S(1)) < snap) return v(i + 1);
  if (n == 2) return v(0) + frac * (v(1) - v(0));

  const Eigen::Index npts = std::min<Eigen::Index>(4, n);
  Eigen::Index first = i - (npts == 4 ? 1 : 0);
  first = std::clamp<Eigen::Index>(first, 0, n - npts);
  const S x = u - S(first);  // position relative to the first stencil node
  S acc(0);
  for (Eigen::Index a = 0; a < npts; ++a) {
    S w(1);
    for (Eigen::Index b = 0; b < npts; ++b)
      if (b != a) w *= (x - S(b)) / S(a - b);
    acc += w * v(first + a);
  }
  return acc;
}

}  // namespace memodyn
