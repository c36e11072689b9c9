#include "memodyn/newtonian.hpp"

#include "memodyn/error.hpp"

#include <cmath>
#include <utility>

namespace memodyn {

using Eigen::Index;
using Eigen::VectorXd;

Memory memory_of(const AugmentedState<double>& s) {
  return {s(kIw), s(kIgG), s(kIgGt), s(kIy), s(kIz)};
}

Anchor anchor_of(const Traj& traj) {
  if (traj.size() == 0) fail_validation("empty trajectory");
  return {traj.t0(), core_of<double>(traj.state(0))};
}

double force_regular_chua(const ForceContext& c, const RegularChuaParams& p) {
  const double k = p.k, a = p.alpha, b = p.beta, g = p.gamma, xi1 = p.xi - 1.0;
  const double tau = c.t - c.anchor.t0;
  const auto& s0 = c.anchor.core;
  const double h = xi1 - p.g(c.w);
  const double int_h = xi1 * (c.w - s0.w) - c.memory.I_gG;
  const double int_int_h = xi1 * (c.memory.I_w - s0.w * tau) - c.memory.I_gGt;
  const double c0 = a * k * k * (s0.y - s0.w) + k * k * (b + g) * s0.w + k * k * (1 + g) * s0.x;
  const double c1 = k * k * k * (b + g) * s0.x + a * k * k * k * (s0.z + g * (s0.y - s0.w));
  return k * (a * h - 1 - g) * c.rate + k * k * (a - b - g) * c.w + a * k * k * k * g * c.memory.I_w +
         a * k * k * (1 + g) * int_h + a * k * k * k * (b + g) * int_int_h + c0 + c1 * tau;
}

double force_canonical_chua(const ForceContext& c, const CanonicalChuaParams& p) {
  const double k = p.k, a = p.alpha, b = p.beta, g = p.gamma;
  const double tau = c.t - c.anchor.t0;
  const auto& s0 = c.anchor.core;
  const double c0 = k * k * a * (s0.y + s0.w) + k * k * b * s0.w - k * k * g * s0.x;
  const double c1 = k * k * k * (a * s0.z + b * s0.x - a * g * (s0.y + s0.w));
  return -k * k * (a + b) * c.w + k * (g - a * p.g(c.w)) * c.rate + k * k * k * g * a * c.memory.I_w +
         k * k * g * a * c.memory.I_gG - k * k * k * a * b * c.memory.I_gGt + c0 + c1 * tau;
}

double force_mmo_w(const ForceContext& c, const MmoParams& p) {
  const double s = p.s_c, e = p.epsilon, a = p.alpha, K = p.K, b = p.beta;
  const double tau = c.t - c.anchor.t0;
  const auto& s0 = c.anchor.core;
  const double x0 = p.eta * s0.x;
  const double c0 = -(s / e) * (s * s0.y - s * a * (1 - b * e) * s0.w - a * K * e * s * x0 -
                                s * s * a * p.a_s * c.anchor.t0);
  const double c1 = -(s / e) * s * s * a * (b * e * x0 - s0.z);
  return -(s / e) * ((p.g(c.w) + a * K * e) * c.rate + s * a * (1 - b * e) * c.w + s * s * a * p.a_s * c.t +
                     s * a * K * c.memory.I_gG - s * s * a * b * c.memory.I_gGt) +
         c0 + c1 * tau;
}

double force_mmo_x(const ForceContext& c, const MmoParams& p) {
  const double s = p.s_c, e = p.epsilon, a = p.alpha, K = p.K, b = p.beta;
  const auto& s0 = c.anchor.core;
  const double x0 = p.eta * s0.x;
  const double g = p.g(c.w), dg = p.g.derivative()(c.w);
  const double x = c.value;
  const double c0 = (s / e) * s * a * (s0.z - b * e * x0);
  return -(s / e) * (s * a * (1 - b * e) * x + s * a * K * g * x + s * dg * x * x + (a * K * e + g) * c.rate -
                     s * a * b * c.memory.I_gG + s * a * p.a_s) +
         c0;
}

double force_mmo_y(const ForceContext& c, const MmoParams& p) {
  const double s = p.s_c, e = p.epsilon, a = p.alpha, K = p.K, b = p.beta;
  const double g = p.g(c.w);
  const double z0 = c.anchor.core.z;
  return s * a *
         (-(K + g / (e * a)) * c.rate + s * (b - 1 / e - g * K / e) * c.value + g * s * p.a_s / e +
          (g * s / e) * (s * b * c.memory.I_y - z0));
}

double force_mmo_z(const ForceContext& c, const MmoParams& p) {
  const double s = p.s_c, e = p.epsilon, a = p.alpha, K = p.K, b = p.beta;
  const auto& s0 = c.anchor.core;
  const double x0 = p.eta * s0.x;
  return -s * s * a *
         ((K / s) * c.rate + (1 / e - b) * c.value + b * p.a_s - (b / e) * c.memory.I_gG + b * x0 - s0.z / e);
}

double reconstruct_w_from_y(const MmoParams& p, double t, double y, const Memory& m, const Anchor& a) {
  if (p.alpha == 0) fail_validation("reconstruction from y needs alpha != 0");
  return a.core.w + (y - a.core.y) / p.alpha + p.s_c * p.K * m.I_y + p.s_c * m.I_z - p.s_c * p.a_s * (t - a.t0);
}

double reconstruct_w_from_z(const MmoParams& p, double t, double y, double z, const Memory& m, const Anchor& a) {
  if (p.alpha == 0 || p.beta == 0) fail_validation("reconstruction from z needs alpha != 0 and beta != 0");
  const double dz = -p.s_c * p.beta * y, dz0 = -p.s_c * p.beta * a.core.y;
  return a.core.w - (dz - dz0) / (p.s_c * p.alpha * p.beta) - (p.K / p.beta) * (z - a.core.z) + p.s_c * m.I_z -
         p.s_c * p.a_s * (t - a.t0);
}

namespace {

const MmoParams& mmo_params(const Traj& traj) {
  const auto* p = std::get_if<MmoParams>(&traj.model);
  if (!p) fail_validation("reconstruction of w applies to the MMO model only");
  return *p;
}

}  // namespace

VectorXd reconstruct_w_from_x(const Traj& traj) {
  const MmoParams& p = mmo_params(traj);
  const Index n = traj.size();
  const double h = traj.step();
  VectorXd x(n), dx(n);
  for (Index i = 0; i < n; ++i) {
    const CoreState<double> s = core_of<double>(traj.state(i));
    x(i) = p.eta * s.x;
    dx(i) = p.eta * core_rhs(p, s).x;
  }
  VectorXd w(n);
  w(0) = traj.state(0)(kW);
  double acc = 0;
  for (Index i = 1; i < n; ++i) {
    acc += 0.5 * h * (x(i - 1) + x(i)) + h * h / 12.0 * (dx(i - 1) - dx(i));
    w(i) = w(0) + p.s_c * acc;
  }
  return w;
}

VectorXd reconstruct_w_from_y(const Traj& traj) {
  const MmoParams& p = mmo_params(traj);
  const Anchor a = anchor_of(traj);
  VectorXd w(traj.size());
  for (Index i = 0; i < traj.size(); ++i) {
    const AugmentedState<double> s = traj.state(i);
    w(i) = reconstruct_w_from_y(p, traj.times(i), s(kY), memory_of(s), a);
  }
  return w;
}

VectorXd reconstruct_w_from_z(const Traj& traj) {
  const MmoParams& p = mmo_params(traj);
  const Anchor a = anchor_of(traj);
  VectorXd w(traj.size());
  for (Index i = 0; i < traj.size(); ++i) {
    const AugmentedState<double> s = traj.state(i);
    w(i) = reconstruct_w_from_z(p, traj.times(i), s(kY), s(kZ), memory_of(s), a);
  }
  return w;
}

DerivativeChain derivative_chain(const CircuitModel& model, const CoreState<double>& s, int order) {
  if (order < 0 || order > 4) fail_validation("derivative order must lie in [0, 4]");
  using T = Taylor<4>;
  CoreState<T> series{T(s.x), T(s.y), T(s.z), T(s.w)};
  // Each pass fixes one more Taylor coefficient: c_{k+1} = f(S)_k / (k + 1).
  for (int k = 0; k < order; ++k) {
    const CoreState<T> f = core_rhs(model, series);
    series.x.c[k + 1] = f.x.c[k] / (k + 1);
    series.y.c[k + 1] = f.y.c[k] / (k + 1);
    series.z.c[k + 1] = f.z.c[k] / (k + 1);
    series.w.c[k + 1] = f.w.c[k] / (k + 1);
  }
  const double xs = physical_x(model, 1.0);
  DerivativeChain out;
  double factorial = 1;
  for (int k = 0; k <= order; ++k) {
    if (k > 0) factorial *= k;
    out.x[k] = xs * factorial * series.x.c[k];
    out.y[k] = factorial * series.y.c[k];
    out.z[k] = factorial * series.z.c[k];
    out.w[k] = factorial * series.w.c[k];
  }
  return out;
}

JounceTerms jounce_terms(const CanonicalChuaParams& p, double w, double w_dot) {
  const double k = p.k, a = p.alpha, b = p.beta, c = p.gamma;
  const double g = p.g(w), dg = p.g.derivative()(w), ddg = p.g.derivative().derivative()(w);
  JounceTerms j;
  j.c4 = 1;
  j.c3 = k * (a * g - c);
  j.c2 = k * (k * a - k * c * a * g + k * b + 3 * a * dg * w_dot);
  j.c1 = k * k * k * a * (b * g - c);
  j.c0 = -k * k * a * c * dg * w_dot * w_dot + k * a * ddg * w_dot * w_dot * w_dot;
  return j;
}

JounceTerms jounce_terms(const MmoParams& p, double w, double w_dot) {
  const double s = p.s_c, e = p.epsilon, a = p.alpha, K = p.K, b = p.beta;
  const double g = p.g(w), dg = p.g.derivative()(w), ddg = p.g.derivative().derivative()(w);
  JounceTerms j;
  j.c4 = e;
  j.c3 = s * (a * K * e + g);
  j.c2 = s * s * a + s * s * a * K * g - s * s * a * b * e + 3 * s * dg * w_dot;
  j.c1 = -s * s * s * a * b * g;
  j.c0 = s * s * a * K * dg * w_dot * w_dot + s * ddg * w_dot * w_dot * w_dot;
  return j;
}

ResidualReport make_report(std::string claim_id, VectorXd residuals, double scale) {
  ResidualReport r;
  r.claim_id = std::move(claim_id);
  r.residuals = std::move(residuals);
  if (r.residuals.size() > 0) {
    r.max_abs = r.residuals.cwiseAbs().maxCoeff();
    r.rms_residual = std::sqrt(r.residuals.squaredNorm() / double(r.residuals.size()));
  }
  r.normalization = std::max(1.0, scale);
  r.normalized_max = r.max_abs / r.normalization;
  return r;
}

namespace {

std::string claim_id(const CircuitModel& m, Variable v) {
  switch (m.index()) {
    case 0: return "regular_chua.newton_w";
    case 1: return "canonical_chua.newton_w";
    default: break;
  }
  switch (v) {
    case Variable::W: return "mmo.newton_w";
    case Variable::X: return "mmo.newton_x";
    case Variable::Y: return "mmo.newton_y";
    case Variable::Z: return "mmo.newton_z";
  }
  return "?";
}

}  // namespace

ResidualReport newtonian_residual(const Traj& traj, Variable v) {
  if (traj.size() == 0) fail_validation("empty trajectory");
  const CircuitModel& model = traj.model;
  if (v != Variable::W && !std::holds_alternative<MmoParams>(model))
    fail_validation("x, y and z formulations apply to the MMO model only");

  const Anchor anchor = anchor_of(traj);
  VectorXd w_rec;
  if (v == Variable::X) w_rec = reconstruct_w_from_x(traj);
  if (v == Variable::Y) w_rec = reconstruct_w_from_y(traj);

  const Index n = traj.size();
  VectorXd res(n);
  double scale = 0;
  for (Index i = 0; i < n; ++i) {
    const AugmentedState<double> s = traj.state(i);
    const DerivativeChain d = derivative_chain(model, core_of(s), 2);
    ForceContext ctx{traj.times(i), 0, 0, s(kW), memory_of(s), anchor};
    const std::array<double, 5>* chain = &d.w;
    if (v == Variable::X) chain = &d.x, ctx.w = w_rec(i);
    if (v == Variable::Y) chain = &d.y, ctx.w = w_rec(i);
    if (v == Variable::Z) chain = &d.z;
    ctx.value = (*chain)[0];
    ctx.rate = (*chain)[1];
    const double force = std::visit(
        [&](const auto& p) -> double {
          using P = std::decay_t<decltype(p)>;
          if constexpr (std::is_same_v<P, RegularChuaParams>) return force_regular_chua(ctx, p);
          else if constexpr (std::is_same_v<P, CanonicalChuaParams>) return force_canonical_chua(ctx, p);
          else {
            switch (v) {
              case Variable::X: return force_mmo_x(ctx, p);
              case Variable::Y: return force_mmo_y(ctx, p);
              case Variable::Z: return force_mmo_z(ctx, p);
              default: return force_mmo_w(ctx, p);
            }
          }
        },
        model);
    res(i) = (*chain)[2] - force;
    scale = std::max(scale, std::abs((*chain)[2]));
  }
  return make_report(claim_id(model, v), std::move(res), scale);
}

namespace {

template <typename Params>
ResidualReport jounce_residual(const Traj& traj, const Params& p, std::string id) {
  const Index n = traj.size();
  VectorXd res(n);
  double scale = 0;
  for (Index i = 0; i < n; ++i) {
    const DerivativeChain d = derivative_chain(p, core_of<double>(traj.state(i)), 4);
    res(i) = jounce_terms(p, d.w[0], d.w[1]).residual(d.w[1], d.w[2], d.w[3], d.w[4]);
    scale = std::max(scale, std::abs(d.w[2]));
  }
  return make_report(std::move(id), std::move(res), scale);
}

}  // namespace

ResidualReport jounce_residual_canonical(const Traj& traj, const CanonicalChuaParams& p) {
  return jounce_residual(traj, p, "canonical_chua.jounce_w");
}

ResidualReport jounce_residual_mmo(const Traj& traj, const MmoParams& p) {
  return jounce_residual(traj, p, "mmo.jounce_w");
}

ResidualReport reconstruction_residual(const Traj& traj, Variable from) {
  VectorXd w_rec;
  std::string id;
  switch (from) {
    case Variable::X: w_rec = reconstruct_w_from_x(traj), id = "mmo.reconstruct_w_from_x"; break;
    case Variable::Y: w_rec = reconstruct_w_from_y(traj), id = "mmo.reconstruct_w_from_y"; break;
    case Variable::Z: w_rec = reconstruct_w_from_z(traj), id = "mmo.reconstruct_w_from_z"; break;
    case Variable::W: fail_validation("reconstruction needs x, y or z");
  }
  const VectorXd w = traj.column(kW);
  return make_report(std::move(id), w_rec - w, w.cwiseAbs().maxCoeff());
}

std::vector<Claim> verify_all(const Traj& traj) {
  std::vector<Claim> claims;
  const auto add = [&](ResidualReport r, double tol) {
    const bool pass = r.normalized_max <= tol;
    claims.push_back({std::move(r), tol, pass});
  };
  add(newtonian_residual(traj, Variable::W), kNewtonTolerance);
  if (const auto* p = std::get_if<CanonicalChuaParams>(&traj.model)) {
    add(jounce_residual_canonical(traj, *p), kNewtonTolerance);
  }
  if (const auto* p = std::get_if<MmoParams>(&traj.model)) {
    for (Variable v : {Variable::X, Variable::Y, Variable::Z}) add(newtonian_residual(traj, v), kNewtonTolerance);
    for (Variable v : {Variable::X, Variable::Y, Variable::Z})
      add(reconstruction_residual(traj, v), kReconstructionTolerance);
    if (p->a_s == 0) add(jounce_residual_mmo(traj, *p), kNewtonTolerance);
  }
  return claims;
}

}  // namespace memodyn
