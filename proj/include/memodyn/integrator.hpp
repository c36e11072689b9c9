#pragma once

#include "memodyn/circuits.hpp"
#include "memodyn/error.hpp"
#include "memodyn/interpolation.hpp"
#include "memodyn/state.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <sstream>
#include <string>
#include <utility>

namespace memodyn {

enum class Method { RK4Fixed, DormandPrince45Adaptive };

/// `h` is the RK4 step (an upper bound: the span is split into a whole number
/// of steps). For the adaptive method `h * record_stride` is the output
/// spacing and `h` seeds the first step.
struct IntegratorOptions {
  Method method = Method::DormandPrince45Adaptive;
  double h = 1e-3;
  double rtol = 1e-10;
  double atol = 1e-12;
  double t0 = 0.0;
  double t1 = 1.0;
  int record_stride = 1;
};

inline void validate(const IntegratorOptions& o) {
  if (!(o.t1 > o.t0)) fail_validation("integration span must satisfy t1 > t0");
  if (!(o.h > 0)) fail_validation("step h must be positive");
  if (o.record_stride < 1) fail_validation("record_stride must be a positive integer");
  if (o.method == Method::DormandPrince45Adaptive && !(o.rtol > 0 && o.atol > 0))
    fail_validation("rtol and atol must be positive");
}

inline constexpr double kMinAdaptiveStep = 1e-14;

namespace detail {
inline std::string at_time(const char* what, double t) {
  std::ostringstream os;
  os.precision(17);
  os << what << " at t=" << t;
  return os.str();
}
}  // namespace detail

/// Dormand-Prince 5(4) with FSAL and the 4th-order continuous extension.
///
/// F is callable as `Vec f(Scalar t, const Vec& y)`.
template <typename Scalar, int Dim, typename F>
class DormandPrince45 {
 public:
  using Vec = Eigen::Matrix<Scalar, Dim, 1>;

  DormandPrince45(F f, Scalar t0, const Vec& y0, Scalar rtol, Scalar atol, Scalar h0)
      : f_(std::move(f)), t_(t0), t_prev_(t0), y_(y0), y_prev_(y0), rtol_(rtol), atol_(atol), h_(h0) {
    k1_ = f_(t_, y_);
    if (!y_.allFinite() || !k1_.allFinite()) fail_numerical(detail::at_time("divergence", double(t_)));
  }

  Scalar t() const { return t_; }
  Scalar t_prev() const { return t_prev_; }
  const Vec& y() const { return y_; }
  const Vec& y_prev() const { return y_prev_; }
  const Vec& derivative() const { return k1_; }

  /// Takes one accepted step that does not pass t_limit.
  void step(Scalar t_limit) {
    for (;;) {
      Scalar h = std::min(h_, t_limit - t_);
      const bool last = (t_limit - t_ - h) <= Scalar(1e-13) * std::max(Scalar(1), std::abs(t_limit));
      if (last) h = t_limit - t_;
      if (h < Scalar(kMinAdaptiveStep)) fail_numerical(detail::at_time("stiffness failure", double(t_)));

      const Vec k2 = f_(t_ + h * c2, y_ + h * (a21 * k1_));
      const Vec k3 = f_(t_ + h * c3, y_ + h * (a31 * k1_ + a32 * k2));
      const Vec k4 = f_(t_ + h * c4, y_ + h * (a41 * k1_ + a42 * k2 + a43 * k3));
      const Vec k5 = f_(t_ + h * c5, y_ + h * (a51 * k1_ + a52 * k2 + a53 * k3 + a54 * k4));
      const Vec k6 = f_(t_ + h, y_ + h * (a61 * k1_ + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5));
      const Vec y1 = y_ + h * (a71 * k1_ + a73 * k3 + a74 * k4 + a75 * k5 + a76 * k6);
      const Scalar t1 = last ? t_limit : t_ + h;
      const Vec k7 = f_(t1, y1);
      const Vec err = h * (e1 * k1_ + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
      const Vec scale = (atol_ + rtol_ * y_.cwiseAbs().cwiseMax(y1.cwiseAbs()).array()).matrix();
      const Scalar err_norm = std::sqrt((err.cwiseQuotient(scale)).squaredNorm() / Scalar(y_.size()));

      if (!std::isfinite(double(err_norm))) {
        h_ = h * Scalar(0.1);
        if (h_ < Scalar(kMinAdaptiveStep)) fail_numerical(detail::at_time("divergence", double(t_)));
        continue;
      }
      if (err_norm <= Scalar(1)) {
        const Vec ydiff = y1 - y_;
        const Vec bspl = h * k1_ - ydiff;
        r1_ = y_;
        r2_ = ydiff;
        r3_ = bspl;
        r4_ = ydiff - h * k7 - bspl;
        r5_ = h * (d1 * k1_ + d3 * k3 + d4 * k4 + d5 * k5 + d6 * k6 + d7 * k7);
        t_prev_ = t_;
        y_prev_ = y_;
        t_ = t1;
        y_ = y1;
        k1_ = k7;
        if (!y_.allFinite()) fail_numerical(detail::at_time("divergence", double(t_)));
        const Scalar grow = err_norm == Scalar(0) ? Scalar(5) : Scalar(0.9) * std::pow(err_norm, Scalar(-0.2));
        h_ = h * std::clamp(grow, Scalar(0.2), Scalar(5));
        return;
      }
      h_ = h * std::clamp(Scalar(0.9) * std::pow(err_norm, Scalar(-0.2)), Scalar(0.1), Scalar(1));
    }
  }

  /// State at tq in [t_prev, t] from the last accepted step.
  Vec dense(Scalar tq) const {
    if (tq == t_) return y_;
    if (tq == t_prev_) return y_prev_;
    const Scalar th = (tq - t_prev_) / (t_ - t_prev_);
    const Scalar th1 = Scalar(1) - th;
    return r1_ + th * (r2_ + th1 * (r3_ + th * (r4_ + th1 * r5_)));
  }

 private:
  static constexpr Scalar c2 = Scalar(1) / 5, c3 = Scalar(3) / 10, c4 = Scalar(4) / 5, c5 = Scalar(8) / 9;
  static constexpr Scalar a21 = Scalar(1) / 5;
  static constexpr Scalar a31 = Scalar(3) / 40, a32 = Scalar(9) / 40;
  static constexpr Scalar a41 = Scalar(44) / 45, a42 = Scalar(-56) / 15, a43 = Scalar(32) / 9;
  static constexpr Scalar a51 = Scalar(19372) / 6561, a52 = Scalar(-25360) / 2187,
                          a53 = Scalar(64448) / 6561, a54 = Scalar(-212) / 729;
  static constexpr Scalar a61 = Scalar(9017) / 3168, a62 = Scalar(-355) / 33, a63 = Scalar(46732) / 5247,
                          a64 = Scalar(49) / 176, a65 = Scalar(-5103) / 18656;
  static constexpr Scalar a71 = Scalar(35) / 384, a73 = Scalar(500) / 1113, a74 = Scalar(125) / 192,
                          a75 = Scalar(-2187) / 6784, a76 = Scalar(11) / 84;
  static constexpr Scalar e1 = Scalar(71) / 57600, e3 = Scalar(-71) / 16695, e4 = Scalar(71) / 1920,
                          e5 = Scalar(-17253) / 339200, e6 = Scalar(22) / 525, e7 = Scalar(-1) / 40;
  static constexpr Scalar d1 = Scalar(-12715105075.0L / 11282082432.0L),
                          d3 = Scalar(87487479700.0L / 32700410799.0L),
                          d4 = Scalar(-10690763975.0L / 1880347072.0L),
                          d5 = Scalar(701980252875.0L / 199316789632.0L),
                          d6 = Scalar(-1453857185.0L / 822651844.0L),
                          d7 = Scalar(69997945.0L / 29380423.0L);

  F f_;
  Scalar t_, t_prev_;
  Vec y_, y_prev_, k1_;
  Vec r1_, r2_, r3_, r4_, r5_;
  Scalar rtol_, atol_, h_;
};

/// Uniformly sampled solution of a generic ODE system.
template <typename Scalar, int Dim>
struct OdeSolution {
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> times;
  Eigen::Matrix<Scalar, Eigen::Dynamic, Dim> states;
};

/// Integrates y' = f(t, y) and records a uniform grid over [t0, t1].
template <typename Scalar, int Dim, typename F>
OdeSolution<Scalar, Dim> solve_ode(F f, const Eigen::Matrix<Scalar, Dim, 1>& y0, const IntegratorOptions& o) {
  validate(o);
  using Vec = Eigen::Matrix<Scalar, Dim, 1>;
  const Scalar t0(o.t0), t1(o.t1), span = t1 - t0;
  const auto time_at = [&](Eigen::Index j, Eigen::Index n) {
    return j == n ? t1 : t0 + span * Scalar(j) / Scalar(n);
  };

  OdeSolution<Scalar, Dim> out;
  if (o.method == Method::RK4Fixed) {
    const Eigen::Index stride = o.record_stride;
    const Eigen::Index n_out = static_cast<Eigen::Index>(std::ceil(double(span) / (o.h * stride) - 1e-9));
    const Eigen::Index n_steps = std::max<Eigen::Index>(1, n_out) * stride;
    const Eigen::Index n_rec = n_steps / stride;
    out.times.resize(n_rec + 1);
    out.states.resize(n_rec + 1, y0.size());
    Vec y = y0;
    out.times(0) = t0;
    out.states.row(0) = y.transpose();
    for (Eigen::Index i = 0; i < n_steps; ++i) {
      const Scalar t = time_at(i, n_steps);
      const Scalar h = time_at(i + 1, n_steps) - t;
      const Vec k1 = f(t, y);
      const Scalar half = h / Scalar(2);
      const Vec k2 = f(t + half, y + half * k1);
      const Vec k3 = f(t + half, y + half * k2);
      const Vec k4 = f(t + h, y + h * k3);
      y += (h / Scalar(6)) * (k1 + Scalar(2) * k2 + Scalar(2) * k3 + k4);
      if (!y.allFinite()) fail_numerical(detail::at_time("divergence", double(t + h)));
      if ((i + 1) % stride == 0) {
        const Eigen::Index j = (i + 1) / stride;
        out.times(j) = time_at(j, n_rec);
        out.states.row(j) = y.transpose();
      }
    }
    return out;
  }

  const Eigen::Index n_out = std::max<Eigen::Index>(
      1, static_cast<Eigen::Index>(std::ceil(double(span) / (o.h * o.record_stride) - 1e-9)));
  out.times.resize(n_out + 1);
  out.states.resize(n_out + 1, y0.size());
  for (Eigen::Index j = 0; j <= n_out; ++j) out.times(j) = time_at(j, n_out);
  out.states.row(0) = y0.transpose();

  DormandPrince45<Scalar, Dim, F> dp(std::move(f), t0, y0, Scalar(o.rtol), Scalar(o.atol),
                                     std::min(Scalar(o.h), span));
  Eigen::Index next = 1;
  while (next <= n_out) {
    dp.step(t1);
    while (next <= n_out && (out.times(next) <= dp.t() || (next == n_out && dp.t() == t1))) {
      out.states.row(next) = dp.dense(out.times(next)).transpose();
      ++next;
    }
  }
  return out;
}

/// Uniformly sampled augmented-state trajectory of one circuit model.
template <typename Scalar>
struct Trajectory {
  CircuitModel model;
  Eigen::Matrix<Scalar, Eigen::Dynamic, 1> times;
  Eigen::Matrix<Scalar, Eigen::Dynamic, kStateDim> states;

  Eigen::Index size() const { return times.size(); }
  Scalar t0() const { return times(0); }
  Scalar t_end() const { return times(times.size() - 1); }
  Scalar step() const { return size() > 1 ? (t_end() - t0()) / Scalar(size() - 1) : Scalar(0); }
  AugmentedState<Scalar> state(Eigen::Index i) const { return states.row(i).transpose(); }
  auto column(int idx) const { return states.col(idx); }
};

/// Rejects explicit fixed steps that are too coarse for a strongly singular MMO system.
inline void check_stiffness_guard(const CircuitModel& model, const IntegratorOptions& o) {
  const auto* p = std::get_if<MmoParams>(&model);
  if (!p || p->epsilon >= 1e-3 || o.method == Method::DormandPrince45Adaptive) return;
  if (!(o.h < p->epsilon / 10))
    fail_validation("stiffness guard: epsilon < 1e-3 needs the adaptive method or h < epsilon/10");
}

/// Integrates the augmented system from the core state s0; memory integrals start at zero.
template <typename Scalar>
Trajectory<Scalar> integrate(const CircuitModel& model, const CoreState<Scalar>& s0, const IntegratorOptions& o) {
  validate(model);
  validate(o);
  check_stiffness_guard(model, o);
  const auto f = [&model](Scalar t, const AugmentedState<Scalar>& s) { return rhs(model, t, s); };
  OdeSolution<Scalar, kStateDim> sol = solve_ode<Scalar, kStateDim>(f, augment(s0), o);
  return Trajectory<Scalar>{model, std::move(sol.times), std::move(sol.states)};
}

/// Cubic resampling onto n uniform points over the same span; endpoints kept exactly.
template <typename Scalar>
Trajectory<Scalar> resample(const Trajectory<Scalar>& traj, Eigen::Index n) {
  if (n < 2) fail_validation("resample needs n >= 2");
  if (traj.size() < 2) fail_validation("resample needs a trajectory with at least 2 samples");
  if (n == traj.size()) return traj;
  Trajectory<Scalar> out{traj.model, {}, {}};
  out.times.resize(n);
  out.states.resize(n, kStateDim);
  const Scalar t0 = traj.t0(), t1 = traj.t_end(), dt = traj.step();
  for (Eigen::Index j = 0; j < n; ++j) {
    const Scalar t = j == n - 1 ? t1 : t0 + (t1 - t0) * Scalar(j) / Scalar(n - 1);
    out.times(j) = t;
    if (j == 0) {
      out.states.row(j) = traj.states.row(0);
    } else if (j == n - 1) {
      out.states.row(j) = traj.states.row(traj.size() - 1);
    } else {
      for (int c = 0; c < kStateDim; ++c) out.states(j, c) = interpolate_uniform(traj.states.col(c), t0, dt, t);
    }
  }
  return out;
}

}  // namespace memodyn
