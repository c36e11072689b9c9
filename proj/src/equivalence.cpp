#include "memodyn/equivalence.hpp"

#include "memodyn/analysis.hpp"
#include "memodyn/error.hpp"

#include <cmath>
#include <numbers>

namespace memodyn {

using Eigen::VectorXd;

std::string_view to_string(EquivalentKind kind) {
  return kind == EquivalentKind::ParallelGC ? "parallel_gc" : "series_rl";
}

namespace {

constexpr double kRadicandRoundOff = 1e-12;

struct PeriodIntegrals {
  double v_sq, i_sq, energy;
};

PeriodIntegrals integrals(const Eigen::Ref<const VectorXd>& v, const Eigen::Ref<const VectorXd>& i, double T) {
  if (v.size() != i.size()) fail_validation("v and i must have the same length");
  if (v.size() < 2) fail_validation("one-period waveform needs at least 2 samples");
  if (!(T > 0)) fail_validation("period must be positive");
  const double dt = T / double(v.size() - 1);
  return {trapezoid(v.array().square().matrix(), dt), trapezoid(i.array().square().matrix(), dt),
          trapezoid(v.cwiseProduct(i), dt)};
}

double clamped_root(double radicand, double scale) {
  if (radicand >= 0) return std::sqrt(radicand);
  if (radicand >= -kRadicandRoundOff * scale) return 0.0;
  fail_numerical("negative radicand beyond round-off: Cauchy-Schwarz violated");
}

LinearEquivalent build(EquivalentKind kind, const PeriodIntegrals& q, double T, double denom) {
  if (!(denom > 0)) fail_validation("degenerate waveform");
  LinearEquivalent eq;
  eq.kind = kind;
  eq.T = T;
  eq.v_sq = q.v_sq;
  eq.i_sq = q.i_sq;
  eq.energy = q.energy;
  const double product = q.v_sq * q.i_sq;
  eq.radicand = product - q.energy * q.energy;
  eq.resistive = q.energy / denom;
  eq.reactive = T / (2 * std::numbers::pi * denom) * clamped_root(eq.radicand, product);
  const double omega_x = 2 * std::numbers::pi * eq.reactive / T;
  eq.magnitude = std::hypot(eq.resistive, omega_x);
  return eq;
}

}  // namespace

LinearEquivalent gc_equivalent(const Eigen::Ref<const VectorXd>& v, const Eigen::Ref<const VectorXd>& i, double T) {
  const PeriodIntegrals q = integrals(v, i, T);
  return build(EquivalentKind::ParallelGC, q, T, q.v_sq);
}

LinearEquivalent rl_equivalent(const Eigen::Ref<const VectorXd>& v, const Eigen::Ref<const VectorXd>& i, double T) {
  const PeriodIntegrals q = integrals(v, i, T);
  return build(EquivalentKind::SeriesRL, q, T, q.i_sq);
}

double identity_residual(const LinearEquivalent& eq) {
  const double omega_x = 2 * std::numbers::pi * eq.reactive / eq.T;
  const double lhs = eq.resistive * eq.resistive + omega_x * omega_x;
  const double rhs = eq.kind == EquivalentKind::ParallelGC ? eq.i_sq / eq.v_sq : eq.v_sq / eq.i_sq;
  return std::abs(lhs - rhs);
}

double sinusoidal_response_rms(const LinearEquivalent& eq, double input_rms) {
  return eq.magnitude * input_rms;
}

}  // namespace memodyn
