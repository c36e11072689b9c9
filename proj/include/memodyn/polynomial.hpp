#pragma once

#include <Eigen/Dense>

#include <initializer_list>

namespace memodyn {

/// Dense polynomial p(w) = sum_i a_i w^i, coefficients stored by degree.
///
/// Evaluation is templated on the argument type so the same polynomial can be
/// applied to plain scalars and to truncated Taylor series.
template <typename Scalar>
class Polynomial {
 public:
  using Coefficients = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

  Polynomial() : coeffs_(Coefficients::Zero(1)) {}
  Polynomial(std::initializer_list<Scalar> coeffs) : coeffs_(static_cast<Eigen::Index>(coeffs.size())) {
    Eigen::Index i = 0;
    for (Scalar c : coeffs) coeffs_(i++) = c;
    if (coeffs_.size() == 0) coeffs_ = Coefficients::Zero(1);
  }
  explicit Polynomial(Coefficients coeffs) : coeffs_(std::move(coeffs)) {
    if (coeffs_.size() == 0) coeffs_ = Coefficients::Zero(1);
  }

  const Coefficients& coefficients() const { return coeffs_; }
  Eigen::Index degree() const { return coeffs_.size() - 1; }

  /// Horner evaluation.
  template <typename Arg>
  Arg operator()(const Arg& w) const {
    Arg acc(coeffs_(degree()));
    for (Eigen::Index i = degree() - 1; i >= 0; --i) acc = acc * w + Arg(coeffs_(i));
    return acc;
  }

  /// Antiderivative normalized so that it vanishes at w = 0.
  template <typename Arg>
  Arg antiderivative(const Arg& w) const {
    Arg acc(coeffs_(degree()) / Scalar(degree() + 1));
    for (Eigen::Index i = degree() - 1; i >= 0; --i) acc = acc * w + Arg(coeffs_(i) / Scalar(i + 1));
    return acc * w;
  }

  Polynomial derivative() const {
    if (degree() == 0) return Polynomial();
    Coefficients d(degree());
    for (Eigen::Index i = 1; i <= degree(); ++i) d(i - 1) = Scalar(i) * coeffs_(i);
    return Polynomial(std::move(d));
  }

  bool is_constant() const { return (coeffs_.tail(degree()).array() == Scalar(0)).all(); }

 private:
  Coefficients coeffs_;
};

/// g(w) = a + 3 b w^2, the memductance used by the op-amp realization.
template <typename Scalar>
Polynomial<Scalar> quadratic_memductance(Scalar a, Scalar b) {
  return Polynomial<Scalar>{a, Scalar(0), Scalar(3) * b};
}

}  // namespace memodyn
