#include "oracles.hpp"

#include <memodyn/memelement.hpp>
#include <memodyn/polynomial.hpp>

#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

using namespace memodyn;

namespace {

MemElementSpec<double> spec_of(ElementKind kind, Polynomial<double> g) {
  return {kind, std::move(g)};
}

Eigen::VectorXd sampled(int n, double t1, double (*f)(double)) {
  Eigen::VectorXd v(n);
  for (int i = 0; i < n; ++i) v(i) = f(t1 * i / (n - 1));
  return v;
}

}  // namespace

TEST_CASE("eval_g evaluates the polynomial") {
  const auto s = spec_of(ElementKind::VCMR, quadratic_memductance(1.0, 1.0));
  CHECK(eval_g(s, 0.0) == 1.0);
  CHECK(eval_g(s, 2.0) == 13.0);
  CHECK(eval_g(spec_of(ElementKind::CCMR, Polynomial<double>{0.0}), 7.5) == 0.0);
}

TEST_CASE("eval_G is the antiderivative vanishing at zero") {
  const auto s = spec_of(ElementKind::VCMR, quadratic_memductance(1.0, 1.0));
  CHECK(eval_G(s, 2.0) == doctest::Approx(10.0).epsilon(1e-15));
  CHECK(eval_G(s, 0.0) == 0.0);
  CHECK(eval_G(spec_of(ElementKind::VCMR, Polynomial<double>{2.0}), 3.0) == 6.0);
}

TEST_CASE("G(v) - G(u) matches Simpson quadrature of g") {
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> coef(-2.0, 2.0), arg(-3.0, 3.0);
  for (int trial = 0; trial < 50; ++trial) {
    Polynomial<double>::Coefficients c(1 + trial % 5);
    for (auto& v : c) v = coef(rng);
    const auto s = spec_of(ElementKind::QCMC, Polynomial<double>(c));
    double u = arg(rng), v = arg(rng);
    if (u > v) std::swap(u, v);
    const double exact = eval_G(s, v) - eval_G(s, u);
    const double quad = oracle::simpson([&](double w) { return eval_g(s, w); }, u, v, 4000);
    CHECK(std::abs(exact - quad) <= 1e-10 * std::max(1.0, std::abs(quad)));
  }
}

TEST_CASE("roles follow the six element kinds") {
  CHECK(roles(ElementKind::CCMR).y == "v");
  CHECK(roles(ElementKind::CCMR).x == "i");
  CHECK(roles(ElementKind::CCMR).w == "q");
  CHECK(roles(ElementKind::VCMR).w == "phi");
  CHECK(roles(ElementKind::QCMC).w == "TIQ");
  CHECK(roles(ElementKind::FCML).w == "TIF");
  for (ElementKind k : kAllElementKinds) CHECK(parse_element_kind(to_string(k)) == k);
  CHECK_THROWS_WITH(parse_element_kind("XYZ"), doctest::Contains("unknown mem-element kind"));
}

TEST_CASE("simulate_element with zero input holds w") {
  const auto s = spec_of(ElementKind::VCMR, quadratic_memductance(1.0, 1.0));
  const auto r = simulate_element(s, Eigen::VectorXd::Zero(100), 0.01, 3.0);
  CHECK((r.w.array() == 3.0).all());
  CHECK((r.y.array() == 0.0).all());
}

TEST_CASE("simulate_element integrates cos t to sin t") {
  const int n = 10001;
  const double T = 2 * std::numbers::pi, dt = T / (n - 1);
  const Eigen::VectorXd x = sampled(n, T, [](double t) { return std::cos(t); });
  const auto r = simulate_element(spec_of(ElementKind::VCMR, Polynomial<double>{1.0}), x, dt, 0.0);
  double err_w = 0, err_y = 0;
  for (int i = 0; i < n; ++i) {
    err_w = std::max(err_w, std::abs(r.w(i) - std::sin(dt * i)));
    err_y = std::max(err_y, std::abs(r.y(i) - std::cos(dt * i)));
  }
  CHECK(err_w < 1e-10);
  CHECK(err_y < 1e-15);
}

TEST_CASE("simulate_element composes g = 3 w^2 with the integrated input") {
  const int n = 10001;
  const double T = 2 * std::numbers::pi, dt = T / (n - 1);
  const Eigen::VectorXd x = sampled(n, T, [](double t) { return std::cos(t); });
  const auto r = simulate_element(spec_of(ElementKind::CCMR, Polynomial<double>{0.0, 0.0, 3.0}), x, dt, 0.0);
  double err = 0;
  for (int i = 0; i < n; ++i) {
    const double t = dt * i;
    err = std::max(err, std::abs(r.y(i) - 3 * std::sin(t) * std::sin(t) * std::cos(t)));
  }
  CHECK(err < 1e-9);
}

TEST_CASE("constant g gives y = c x exactly") {
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  Eigen::VectorXd x(500);
  for (auto& v : x) v = nd(rng);
  const auto r = simulate_element(spec_of(ElementKind::FCML, Polynomial<double>{2.5}), x, 0.1, -1.0);
  CHECK((r.y.array() == 2.5 * x.array()).all());
}

TEST_CASE("pinched hysteresis: y vanishes wherever x does") {
  const int n = 4001;
  const double T = 4 * std::numbers::pi, dt = T / (n - 1);
  Eigen::VectorXd x(n);
  for (int i = 0; i < n; ++i) x(i) = std::sin(dt * i) * (i % 400 == 0 ? 0.0 : 1.0);
  const auto r = simulate_element(spec_of(ElementKind::VCMR, quadratic_memductance(0.5, 0.2)), x, dt, 0.1);
  for (int i = 0; i < n; ++i)
    if (x(i) == 0.0) CHECK(r.y(i) == 0.0);
}

TEST_CASE("simulate_element rejects an empty waveform") {
  const auto s = spec_of(ElementKind::VCMR, Polynomial<double>{1.0});
  CHECK_THROWS_WITH(simulate_element(s, Eigen::VectorXd(), 0.1, 0.0), "empty waveform");
}
