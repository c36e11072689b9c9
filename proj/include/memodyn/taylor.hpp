#pragma once

#include <array>
#include <cstddef>

namespace memodyn {

/// Truncated Taylor series c_0 + c_1 t + ... + c_N t^N.
///
/// Feeding these through an ODE right-hand side yields the Taylor coefficients
/// of the solution, i.e. exact higher time derivatives of the state.
template <std::size_t N>
struct Taylor {
  std::array<double, N + 1> c{};

  Taylor() = default;
  Taylor(double value) { c[0] = value; }  // NOLINT: implicit for mixed arithmetic

  double value() const { return c[0]; }

  Taylor& operator+=(const Taylor& o) {
    for (std::size_t i = 0; i <= N; ++i) c[i] += o.c[i];
    return *this;
  }
  Taylor& operator-=(const Taylor& o) {
    for (std::size_t i = 0; i <= N; ++i) c[i] -= o.c[i];
    return *this;
  }
  Taylor& operator*=(double s) {
    for (auto& v : c) v *= s;
    return *this;
  }
};

template <std::size_t N>
Taylor<N> operator+(Taylor<N> a, const Taylor<N>& b) { return a += b; }
template <std::size_t N>
Taylor<N> operator-(Taylor<N> a, const Taylor<N>& b) { return a -= b; }
template <std::size_t N>
Taylor<N> operator-(Taylor<N> a) { return a *= -1.0; }
template <std::size_t N>
Taylor<N> operator*(Taylor<N> a, double s) { return a *= s; }
template <std::size_t N>
Taylor<N> operator*(double s, Taylor<N> a) { return a *= s; }
template <std::size_t N>
Taylor<N> operator/(Taylor<N> a, double s) { return a *= 1.0 / s; }
template <std::size_t N>
Taylor<N> operator+(Taylor<N> a, double s) { a.c[0] += s; return a; }
template <std::size_t N>
Taylor<N> operator+(double s, Taylor<N> a) { a.c[0] += s; return a; }
template <std::size_t N>
Taylor<N> operator-(Taylor<N> a, double s) { a.c[0] -= s; return a; }
template <std::size_t N>
Taylor<N> operator-(double s, const Taylor<N>& a) { return s + (-a); }

// Cauchy product, truncated at degree N.
template <std::size_t N>
Taylor<N> operator*(const Taylor<N>& a, const Taylor<N>& b) {
  Taylor<N> r;
  for (std::size_t i = 0; i <= N; ++i) {
    double acc = 0.0;
    for (std::size_t j = 0; j <= i; ++j) acc += a.c[j] * b.c[i - j];
    r.c[i] = acc;
  }
  return r;
}

}  // namespace memodyn
