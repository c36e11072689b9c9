#include "oracles.hpp"

#include <memodyn/newtonian.hpp>

#include <doctest.h>

#include <cmath>
#include <random>

using namespace memodyn;

namespace {

CoreState<double> random_core(std::mt19937_64& rng, double scale = 0.5) {
  std::uniform_real_distribution<double> u(-scale, scale);
  return {u(rng), u(rng), u(rng), u(rng)};
}

Eigen::Vector4d as_vec(const CoreState<double>& s) { return {s.x, s.y, s.z, s.w}; }

/// Core state after flowing for time dt (negative allowed) with a fine classical RK4.
CoreState<double> flow(const CircuitModel& model, const CoreState<double>& s, double dt) {
  const auto f = [&](double t, const Eigen::VectorXd& y) -> Eigen::VectorXd {
    return rhs(model, t, AugmentedState<double>(y));
  };
  const Eigen::VectorXd end = oracle::rk4(f, Eigen::VectorXd(augment(s)), 0.0, dt, 200);
  return {end(kX), end(kY), end(kZ), end(kW)};
}

std::array<const std::array<double, 5>*, 4> rows(const DerivativeChain& c) {
  return {&c.x, &c.y, &c.z, &c.w};
}

void check_chain_against_matrix(const CircuitModel& model, const oracle::Mat4& A, const CoreState<double>& s,
                                double x_scale) {
  const DerivativeChain chain = derivative_chain(model, s);
  Eigen::Vector4d d = as_vec(s);
  for (int n = 0; n <= 4; ++n) {
    const double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
    CHECK(std::abs(chain.x[n] - x_scale * d(0)) <= 1e-12 * scale * x_scale);
    CHECK(std::abs(chain.y[n] - d(1)) <= 1e-12 * scale);
    CHECK(std::abs(chain.z[n] - d(2)) <= 1e-12 * scale);
    CHECK(std::abs(chain.w[n] - d(3)) <= 1e-12 * scale);
    d = A * d;
  }
}

void check_chain_against_flow(const CircuitModel& model, const CoreState<double>& s, double h) {
  const DerivativeChain c0 = derivative_chain(model, s);
  const DerivativeChain cp = derivative_chain(model, flow(model, s, h));
  const DerivativeChain cm = derivative_chain(model, flow(model, s, -h));
  const auto r0 = rows(c0), rp = rows(cp), rm = rows(cm);
  for (int v = 0; v < 4; ++v) {
    for (int n = 0; n < 4; ++n) {
      const double fd = ((*rp[v])[n] - (*rm[v])[n]) / (2 * h);
      const double exact = (*r0[v])[n + 1];
      CHECK(std::abs(fd - exact) <= 1e-6 * std::max(1.0, std::abs(exact)));
    }
  }
}

MmoParams smooth_mmo() {
  MmoParams p;
  p.epsilon = 0.5;
  return p;
}

Traj short_run(const CircuitModel& model, const CoreState<double>& s0, double t1 = 5.0) {
  IntegratorOptions o;
  o.t1 = t1;
  o.h = 1e-3;
  return integrate<double>(model, s0, o);
}

}  // namespace

TEST_CASE("forces vanish at the origin without bias") {
  ForceContext ctx;
  MmoParams m;
  m.a_s = 0;
  CHECK(force_regular_chua(ctx, RegularChuaParams{}) == 0.0);
  CHECK(force_canonical_chua(ctx, CanonicalChuaParams{}) == 0.0);
  CHECK(force_mmo_w(ctx, m) == 0.0);
  CHECK(force_mmo_x(ctx, m) == 0.0);
  CHECK(force_mmo_y(ctx, m) == 0.0);
  CHECK(force_mmo_z(ctx, m) == 0.0);
}

TEST_CASE("derivative chain of constant-g systems equals matrix powers") {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const CoreState<double> s = random_core(rng);
    RegularChuaParams r;
    r.g = Polynomial<double>{0.4};
    check_chain_against_matrix(r, oracle::regular_matrix(r.k, r.alpha, r.beta, r.gamma, r.xi, 0.4), s, 1.0);

    CanonicalChuaParams c;
    c.k = 1.7;
    c.g = Polynomial<double>{-0.3};
    check_chain_against_matrix(c, oracle::canonical_matrix(c.k, c.alpha, c.beta, c.gamma, -0.3), s, 1.0);

    MmoParams m;
    m.a_s = 0;
    m.epsilon = 0.2;
    m.g = Polynomial<double>{0.6};
    check_chain_against_matrix(m, oracle::mmo_matrix(m, 0.6), s, m.eta);
  }
}

TEST_CASE("derivative chain of nonlinear systems agrees with finite differences of the flow") {
  std::mt19937_64 rng(12);
  MmoParams m;
  m.epsilon = 0.1;
  for (int trial = 0; trial < 3; ++trial) {
    const CoreState<double> s = random_core(rng);
    check_chain_against_flow(RegularChuaParams{}, s, 2e-4);
    check_chain_against_flow(CanonicalChuaParams{}, s, 2e-4);
    check_chain_against_flow(m, CoreState<double>{0.1 * s.x, s.y, s.z, s.w}, 5e-5);
  }
}

TEST_CASE("canonical Chua: w'' = k^2 alpha y - k alpha g(w) w'") {
  std::mt19937_64 rng(13);
  CanonicalChuaParams p;
  p.k = 1.4;
  for (int trial = 0; trial < 20; ++trial) {
    const CoreState<double> s = random_core(rng, 1.0);
    const DerivativeChain c = derivative_chain(p, s);
    const double expected = p.k * p.k * p.alpha * s.y - p.k * p.alpha * p.g(s.w) * c.w[1];
    CHECK(c.w[2] == doctest::Approx(expected).epsilon(1e-13));
  }
}

TEST_CASE("MMO: w' = s_c x with physical x") {
  MmoParams p;
  p.s_c = 2.5;
  const DerivativeChain c = derivative_chain(p, CoreState<double>{0.03, 0.2, -0.1, 0.4});
  CHECK(c.x[0] == doctest::Approx(p.eta * 0.03));
  CHECK(c.w[1] == doctest::Approx(p.s_c * c.x[0]));
}

TEST_CASE("jounce coefficients of constant-g systems are the characteristic polynomial") {
  CanonicalChuaParams c;
  c.k = 1.3;
  c.g = Polynomial<double>{0.45};
  const JounceTerms jc = jounce_terms(c, 0.2, -0.1);
  const auto pc = oracle::charpoly(oracle::canonical_matrix(c.k, c.alpha, c.beta, c.gamma, 0.45));
  CHECK(jc.c3 / jc.c4 == doctest::Approx(pc[3]).epsilon(1e-12));
  CHECK(jc.c2 / jc.c4 == doctest::Approx(pc[2]).epsilon(1e-12));
  CHECK(jc.c1 / jc.c4 == doctest::Approx(pc[1]).epsilon(1e-12));
  CHECK(std::abs(pc[0]) < 1e-12);
  CHECK(jc.c0 == 0.0);

  MmoParams m;
  m.a_s = 0;
  m.s_c = 1.5;
  m.g = Polynomial<double>{-0.25};
  const JounceTerms jm = jounce_terms(m, 0.3, 0.7);
  const auto pm = oracle::charpoly(oracle::mmo_matrix(m, -0.25));
  CHECK(jm.c3 / jm.c4 == doctest::Approx(pm[3]).epsilon(1e-12));
  CHECK(jm.c2 / jm.c4 == doctest::Approx(pm[2]).epsilon(1e-12));
  CHECK(jm.c1 / jm.c4 == doctest::Approx(pm[1]).epsilon(1e-12));
  CHECK(jm.c0 == 0.0);
}

TEST_CASE("jounce equations hold pointwise on nonlinear systems") {
  std::mt19937_64 rng(14);
  CanonicalChuaParams c;
  MmoParams m;
  m.a_s = 0;
  m.epsilon = 0.1;
  for (int trial = 0; trial < 20; ++trial) {
    const CoreState<double> s = random_core(rng, 1.0);
    const DerivativeChain dc = derivative_chain(c, s);
    const JounceTerms jc = jounce_terms(c, dc.w[0], dc.w[1]);
    const double scale_c = std::max({1.0, std::abs(dc.w[4]), std::abs(jc.c3 * dc.w[3]), std::abs(jc.c2 * dc.w[2])});
    CHECK(std::abs(jc.residual(dc.w[1], dc.w[2], dc.w[3], dc.w[4])) < 1e-12 * scale_c);

    const DerivativeChain dm = derivative_chain(m, s);
    const JounceTerms jm = jounce_terms(m, dm.w[0], dm.w[1]);
    const double scale_m = std::max({1.0, std::abs(jm.c4 * dm.w[4]), std::abs(jm.c3 * dm.w[3])});
    CHECK(std::abs(jm.residual(dm.w[1], dm.w[2], dm.w[3], dm.w[4])) < 1e-12 * scale_m);
  }
}

TEST_CASE("forces at the anchor equal the second derivatives") {
  std::mt19937_64 rng(15);
  for (int trial = 0; trial < 10; ++trial) {
    const CoreState<double> s = random_core(rng);
    const Anchor anchor{0.7, s};
    ForceContext ctx;
    ctx.t = anchor.t0;
    ctx.anchor = anchor;
    ctx.w = s.w;

    const RegularChuaParams r;
    const DerivativeChain cr = derivative_chain(r, s);
    ctx.value = s.w;
    ctx.rate = cr.w[1];
    CHECK(force_regular_chua(ctx, r) == doctest::Approx(cr.w[2]).epsilon(1e-12));

    const CanonicalChuaParams c;
    const DerivativeChain cc = derivative_chain(c, s);
    ctx.rate = cc.w[1];
    CHECK(force_canonical_chua(ctx, c) == doctest::Approx(cc.w[2]).epsilon(1e-12));

    MmoParams m;
    m.epsilon = 0.2;
    const DerivativeChain cm = derivative_chain(m, s);
    const auto check_mmo = [&](double (*force)(const ForceContext&, const MmoParams&), const std::array<double, 5>& d) {
      ctx.value = d[0];
      ctx.rate = d[1];
      CHECK(force(ctx, m) == doctest::Approx(d[2]).epsilon(1e-12));
    };
    check_mmo(force_mmo_w, cm.w);
    check_mmo(force_mmo_x, cm.x);
    check_mmo(force_mmo_y, cm.y);
    check_mmo(force_mmo_z, cm.z);
  }
}

TEST_CASE("reconstruction at rest is the bias ramp") {
  MmoParams p;
  p.a_s = 0.03;
  p.s_c = 2.0;
  const Anchor anchor{1.0, {}};
  CHECK(reconstruct_w_from_z(p, 3.0, 0.0, 0.0, Memory{}, anchor) == doctest::Approx(-p.s_c * p.a_s * 2.0));
  CHECK(reconstruct_w_from_y(p, 3.0, 0.0, Memory{}, anchor) == doctest::Approx(-p.s_c * p.a_s * 2.0));
}

TEST_CASE("Newtonian residuals along integrated trajectories") {
  const CoreState<double> s0{0.1, 0.05, -0.02, 0.3};
  for (const CircuitModel& model : {CircuitModel{RegularChuaParams{}}, CircuitModel{CanonicalChuaParams{}}}) {
    const ResidualReport r = newtonian_residual(short_run(model, s0));
    CHECK(r.normalized_max < 1e-8);
  }
  const ResidualReport j = jounce_residual_canonical(short_run(CanonicalChuaParams{}, s0), CanonicalChuaParams{});
  CHECK(j.normalized_max < 1e-8);
}

TEST_CASE("smooth MMO regime meets the tight tier") {
  const MmoParams p = smooth_mmo();
  const Traj traj = short_run(p, CoreState<double>{0.02, 0.1, -0.05, 0.2});
  for (Variable v : {Variable::W, Variable::X, Variable::Y, Variable::Z})
    CHECK(newtonian_residual(traj, v).normalized_max < 1e-7);
  for (Variable v : {Variable::X, Variable::Y, Variable::Z})
    CHECK(reconstruction_residual(traj, v).normalized_max < 1e-7);

  MmoParams unbiased = p;
  unbiased.a_s = 0;
  const Traj t2 = short_run(unbiased, CoreState<double>{0.02, 0.1, -0.05, 0.2});
  CHECK(jounce_residual_mmo(t2, unbiased).normalized_max < 1e-7);
}

TEST_CASE("verify_all lists the claims of each model") {
  const CoreState<double> s0{0.01, 0.05, -0.02, 0.3};
  const auto ids = [](const std::vector<Claim>& claims) {
    std::vector<std::string> out;
    for (const Claim& c : claims) {
      out.push_back(c.report.claim_id);
      CHECK_MESSAGE(c.pass, c.report.claim_id);
    }
    return out;
  };
  CHECK(ids(verify_all(short_run(RegularChuaParams{}, s0))) == std::vector<std::string>{"regular_chua.newton_w"});
  CHECK(ids(verify_all(short_run(CanonicalChuaParams{}, s0))) ==
        std::vector<std::string>{"canonical_chua.newton_w", "canonical_chua.jounce_w"});
  const std::vector<std::string> mmo = ids(verify_all(short_run(MmoParams{}, s0)));
  CHECK(mmo.size() == 7);
  CHECK(std::find(mmo.begin(), mmo.end(), "mmo.jounce_w") == mmo.end());
  MmoParams unbiased;
  unbiased.a_s = 0;
  const std::vector<std::string> with_jounce = ids(verify_all(short_run(unbiased, s0)));
  CHECK(std::find(with_jounce.begin(), with_jounce.end(), "mmo.jounce_w") != with_jounce.end());
}

TEST_CASE("make_report normalization") {
  const ResidualReport r = make_report("id", Eigen::Vector3d(3e-9, -4e-9, 0), 0.5);
  CHECK(r.max_abs == 4e-9);
  CHECK(r.normalization == 1.0);
  CHECK(r.rms_residual == doctest::Approx(std::sqrt(25e-18 / 3)));
  CHECK(make_report("id", Eigen::Vector2d(2.0, 1.0), 4.0).normalized_max == 0.5);
}
