#include "oracles.hpp"

#include <memodyn/circuits.hpp>
#include <memodyn/integrator.hpp>

#include <doctest.h>

#include <random>

using namespace memodyn;

namespace {

AugmentedState<double> random_state(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  AugmentedState<double> s;
  for (int i = 0; i < kStateDim; ++i) s(i) = u(rng);
  return s;
}

double linear_oracle_error(const CircuitModel& model, const oracle::Mat4& A, const CoreState<double>& s0) {
  IntegratorOptions o;
  o.t0 = 0;
  o.t1 = 1;
  o.h = 1e-3;
  o.rtol = 1e-12;
  o.atol = 1e-14;
  const oracle::Traj traj = integrate<double>(model, s0, o);
  const oracle::Vec4 expected = oracle::expm(A) * oracle::Vec4(s0.x, s0.y, s0.z, s0.w);
  const AugmentedState<double> end = traj.state(traj.size() - 1);
  const oracle::Vec4 got(end(kX), end(kY), end(kZ), end(kW));
  return (got - expected).cwiseAbs().maxCoeff() / expected.cwiseAbs().maxCoeff();
}

}  // namespace

TEST_CASE("regular Chua right-hand side") {
  RegularChuaParams p;
  CHECK(rhs_regular_chua(0.0, AugmentedState<double>::Zero().eval(), p).isZero(0));

  p.g = Polynomial<double>{0.0};
  p.xi = 1.0;
  std::mt19937_64 rng(1);
  const AugmentedState<double> s = random_state(rng);
  const AugmentedState<double> d = rhs_regular_chua(0.0, s, p);
  CHECK(d(kX) == doctest::Approx(p.k * p.alpha * s(kY)));
  CHECK(d(kIw) == s(kW));
  CHECK(d(kIy) == s(kY));
  CHECK(d(kIz) == s(kZ));
  CHECK(d(kIgGt) == s(kIgG));
}

TEST_CASE("canonical Chua right-hand side") {
  CanonicalChuaParams p;
  p.k = 2.0;
  p.g = Polynomial<double>{0.7};
  CHECK(rhs_canonical_chua(0.0, AugmentedState<double>::Zero().eval(), p).isZero(0));

  AugmentedState<double> s = AugmentedState<double>::Zero();
  s(kX) = 1.0;
  const AugmentedState<double> d = rhs_canonical_chua(0.0, s, p);
  CHECK(d(kX) == doctest::Approx(-p.k * p.alpha * 0.7));
  CHECK(d(kY) == doctest::Approx(-p.k));
  CHECK(d(kZ) == 0.0);
  CHECK(d(kW) == p.k);

  std::mt19937_64 rng(2);
  p.g = quadratic_memductance(-0.3, 0.2);
  const AugmentedState<double> r = random_state(rng);
  const AugmentedState<double> dr = rhs_canonical_chua(0.0, r, p);
  CHECK(dr(kIgG) == doctest::Approx(p.g(r(kW)) * p.k * r(kX)));
  CHECK(dr(kZ) == doctest::Approx(p.k * (p.gamma * r(kZ) - p.beta * r(kY))));
}

TEST_CASE("MMO right-hand side") {
  MmoParams p;
  p.a_s = 0.0;
  CHECK(rhs_mmo(0.0, AugmentedState<double>::Zero().eval(), p).isZero(0));

  p.a_s = 0.01;
  AugmentedState<double> d = rhs_mmo(0.0, AugmentedState<double>::Zero().eval(), p);
  CHECK(d(kY) == doctest::Approx(p.s_c * p.alpha * p.a_s));
  d(kY) = 0;
  CHECK(d.isZero(0));

  std::mt19937_64 rng(3);
  const AugmentedState<double> s = random_state(rng);
  CHECK(rhs_mmo(0.0, s, p)(kW) == doctest::Approx(p.s_c * p.eta * s(kX)));
  CHECK(physical_x(p, s(kX)) == p.eta * s(kX));

  p.epsilon = 0.0;
  CHECK_THROWS_WITH(rhs_mmo(0.0, s, p), "singular parameter must be positive");
  CHECK_THROWS_WITH(validate(CircuitModel{p}), "singular parameter must be positive");
}

TEST_CASE("origin is an equilibrium of every system without bias") {
  MmoParams m;
  m.a_s = 0;
  for (const CircuitModel& model : {CircuitModel{RegularChuaParams{}}, CircuitModel{CanonicalChuaParams{}},
                                    CircuitModel{m}}) {
    CHECK(rhs(model, 0.0, AugmentedState<double>::Zero().eval()).isZero(0));
  }
}

TEST_CASE("constant-g systems match the matrix exponential") {
  const CoreState<double> s0{0.3, -0.2, 0.1, 0.05};
  SUBCASE("regular Chua") {
    RegularChuaParams p;
    p.g = Polynomial<double>{0.4};
    const auto A = oracle::regular_matrix(p.k, p.alpha, p.beta, p.gamma, p.xi, 0.4);
    CHECK(linear_oracle_error(p, A, s0) < 1e-8);
  }
  SUBCASE("canonical Chua") {
    CanonicalChuaParams p;
    p.k = 1.3;
    p.g = Polynomial<double>{-0.2};
    const auto A = oracle::canonical_matrix(p.k, p.alpha, p.beta, p.gamma, -0.2);
    CHECK(linear_oracle_error(p, A, s0) < 1e-8);
  }
  SUBCASE("MMO") {
    MmoParams p;
    p.a_s = 0;
    p.g = Polynomial<double>{0.5};
    const auto A = oracle::mmo_matrix(p, 0.5);
    CHECK(linear_oracle_error(p, A, s0) < 1e-8);
  }
}

TEST_CASE("parameter validation") {
  RegularChuaParams r;
  r.k = 0;
  CHECK_THROWS_WITH(validate(r), "k must be positive");
  MmoParams m;
  m.eta = 0.5;
  CHECK_THROWS_WITH(validate(m), "scaling eta must be >= 1");
  m.eta = 10;
  m.s_c = -1;
  CHECK_THROWS_WITH(validate(m), "time scaling s_c must be positive");
}
