#include "memodyn/analysis.hpp"

#include "memodyn/error.hpp"
#include "memodyn/interpolation.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace memodyn {

using Eigen::Index;
using Eigen::VectorXd;

std::string to_string(const MmoSignature& sig) {
  std::ostringstream os;
  for (std::size_t i = 0; i < sig.size(); ++i) {
    if (i) os << ' ';
    os << sig[i].large << '^' << sig[i].small;
  }
  return os.str();
}

namespace {

// Bisection on an interval where f changes sign from negative to non-negative.
template <typename F>
double bisect_upward(F f, double a, double b) {
  for (int it = 0; it < 200 && b - a > 4e-16 * std::max(1.0, std::abs(a)); ++it) {
    const double m = 0.5 * (a + b);
    if (f(m) < 0) {
      a = m;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

std::vector<double> upward_crossings(const Traj& traj, Index first, double level) {
  const auto y = traj.column(kY);
  const double t0 = traj.t0(), dt = traj.step();
  std::vector<double> times;
  for (Index i = first; i + 1 < traj.size(); ++i) {
    if (y(i) < level && y(i + 1) >= level) {
      const auto f = [&](double t) { return interpolate_uniform(y, t0, dt, t) - level; };
      times.push_back(bisect_upward(f, traj.times(i), traj.times(i + 1)));
    }
  }
  return times;
}

bool returns_agree(const std::vector<double>& c, std::size_t m, double tol, double& period) {
  if (c.size() < m + 1) return false;
  double lo = INFINITY, hi = -INFINITY, sum = 0;
  std::size_t n = 0;
  for (std::size_t i = 0; i + m < c.size(); ++i) {
    const double r = c[i + m] - c[i];
    lo = std::min(lo, r);
    hi = std::max(hi, r);
    sum += r;
    ++n;
  }
  period = sum / double(n);
  return (hi - lo) <= tol * period;
}

}  // namespace

PeriodAnalysis detect_period(const Traj& traj, double transient_fraction, double tol) {
  if (!(transient_fraction >= 0 && transient_fraction < 1))
    fail_validation("transient_fraction must lie in [0, 1)");
  if (!(tol > 0)) fail_validation("period tolerance must be positive");
  if (traj.size() < 4) fail_validation("trajectory too short for period detection");

  const Index first = static_cast<Index>(std::floor(transient_fraction * double(traj.size() - 1)));
  const auto y = traj.column(kY).tail(traj.size() - first);
  PeriodAnalysis pa;
  pa.section_level = y.mean();
  pa.crossing_times = upward_crossings(traj, first, pa.section_level);
  const auto& c = pa.crossing_times;
  if (c.size() < 2) fail_numerical("non-oscillatory trajectory");

  double period = 0;
  // A multiplicity is accepted only with three full periods of crossings.
  for (std::size_t m = 1; 3 * m + 1 <= c.size(); ++m) {
    if (returns_agree(c, m, tol, period)) {
      pa.converged = true;
      pa.crossings_per_period = static_cast<int>(m);
      pa.T = period;
      break;
    }
  }
  if (!pa.converged) pa.T = (c.back() - c.front()) / double(c.size() - 1);
  pa.samples_per_period = pa.T / traj.step();
  return pa;
}

namespace {

struct Peak {
  Index index;
  double amplitude;
};

// Local maxima of x on [lo, hi] with their descent to the higher neighbouring
// trough; peaks whose amplitude falls under the noise floor are merged away.
std::vector<Peak> find_peaks(const Eigen::Ref<const VectorXd>& x, Index lo, Index hi) {
  std::vector<Index> maxima;
  for (Index i = lo + 1; i < hi; ++i)
    if (x(i) > x(i - 1) && x(i) >= x(i + 1)) maxima.push_back(i);
  const double range = x.segment(lo, hi - lo + 1).maxCoeff() - x.segment(lo, hi - lo + 1).minCoeff();
  const double floor = 1e-9 * std::max(range, 1e-300);

  std::vector<Peak> peaks;
  for (;;) {
    peaks.clear();
    for (std::size_t k = 0; k < maxima.size(); ++k) {
      const Index a = k == 0 ? lo : maxima[k - 1];
      const Index b = k + 1 == maxima.size() ? hi : maxima[k + 1];
      const Index i = maxima[k];
      const double left = x.segment(a, i - a + 1).minCoeff();
      const double right = x.segment(i, b - i + 1).minCoeff();
      peaks.push_back({i, x(i) - std::max(left, right)});
    }
    // Drop the weakest sub-floor peak (if any) and recompute its neighbours.
    auto weakest = std::min_element(peaks.begin(), peaks.end(),
                                    [](const Peak& p, const Peak& q) { return p.amplitude < q.amplitude; });
    if (weakest == peaks.end() || weakest->amplitude > floor) break;
    maxima.erase(maxima.begin() + (weakest - peaks.begin()));
  }
  return peaks;
}

}  // namespace

MmoSignature classify_mmo(const Traj& traj, double period, double amplitude_threshold,
                          std::optional<double> window_start) {
  if (!(period > 0)) fail_validation("period must be positive");
  if (!(amplitude_threshold > 0 && amplitude_threshold <= 1))
    fail_validation("amplitude threshold must lie in (0, 1]");
  const double t0 = traj.t0(), t1 = traj.t_end(), dt = traj.step();
  double ws = window_start ? *window_start : t1 - 1.5 * period;
  if (!window_start && ws < t0) ws = std::max(t0, t1 - period);

  const auto index_at = [&](double t) {
    return std::clamp<Index>(static_cast<Index>(std::floor((t - t0) / dt)), 0, traj.size() - 1);
  };
  const Index lo = index_at(ws - period);
  const Index hi = std::min<Index>(traj.size() - 1, index_at(ws + 2 * period) + 1);
  if (hi - lo < 2) return {};

  const VectorXd x = traj.column(kX);
  const std::vector<Peak> all = find_peaks(x, lo, hi);
  std::vector<Peak> in_window;
  for (const Peak& p : all) {
    const double t = traj.times(p.index);
    if (t >= ws && t < ws + period) in_window.push_back(p);
  }
  if (in_window.empty()) return {};

  double max_amp = 0;
  for (const Peak& p : in_window) max_amp = std::max(max_amp, p.amplitude);
  std::vector<bool> large;
  for (const Peak& p : in_window) large.push_back(p.amplitude >= amplitude_threshold * max_amp);

  const auto first_large = std::find(large.begin(), large.end(), true);
  std::rotate(large.begin(), first_large, large.end());

  MmoSignature sig;
  for (std::size_t i = 0; i < large.size();) {
    MmoBlock b;
    while (i < large.size() && large[i]) {
      ++b.large;
      ++i;
    }
    while (i < large.size() && !large[i]) {
      ++b.small;
      ++i;
    }
    sig.push_back(b);
  }
  return sig;
}

MmoSignature classify_mmo(const Traj& traj, const PeriodAnalysis& pa, double amplitude_threshold) {
  std::optional<double> ws;
  for (auto it = pa.crossing_times.rbegin(); it != pa.crossing_times.rend(); ++it) {
    if (*it + pa.T <= traj.t_end() - 2 * traj.step()) {
      ws = *it;
      break;
    }
  }
  return classify_mmo(traj, pa.T, amplitude_threshold, ws);
}

double trapezoid(const Eigen::Ref<const VectorXd>& values, double dt) {
  const Index n = values.size();
  if (n < 2) return 0.0;
  return dt * (values.sum() - 0.5 * (values(0) + values(n - 1)));
}

VectorXd cumulative_trapezoid(const Eigen::Ref<const VectorXd>& values, double dt) {
  VectorXd out = VectorXd::Zero(values.size());
  for (Index i = 1; i < values.size(); ++i) out(i) = out(i - 1) + 0.5 * dt * (values(i - 1) + values(i));
  return out;
}

double loop_integral(const Eigen::Ref<const VectorXd>& f, const Eigen::Ref<const VectorXd>& h) {
  if (f.size() != h.size()) fail_validation("loop_integral: length mismatch");
  const Index n = f.size();
  if (n < 2) return 0.0;
  const auto fm = 0.5 * (f.head(n - 1) + f.tail(n - 1)).array();
  const auto dh = (h.tail(n - 1) - h.head(n - 1)).array();
  return (fm * dh).sum();
}

std::string_view row_key(LoopRow row) {
  switch (row) {
    case LoopRow::GxX: return "gx_x";
    case LoopRow::XG: return "x_G";
    case LoopRow::GxW: return "gx_w";
    case LoopRow::GW: return "G_w";
    case LoopRow::GxG: return "gx_G";
    case LoopRow::XW: return "x_w";
  }
  return "?";
}

namespace {

// Periodic central difference over a closed record (last sample repeats the first).
VectorXd periodic_derivative(const VectorXd& f, double dt) {
  const Index n = f.size();
  VectorXd d(n);
  if (n < 3) return VectorXd::Zero(n);
  const Index m = n - 1;
  for (Index k = 0; k < m; ++k) {
    const Index prev = k == 0 ? m - 1 : k - 1;
    d(k) = (f(k + 1) - f(prev)) / (2 * dt);
  }
  d(m) = d(0);
  return d;
}

}  // namespace

CircuitSignals circuit_signals(const ElementWaveforms& wf, const MemElementSpec<double>& spec) {
  const Index n = wf.x.size();
  VectorXd y(n);
  for (Index k = 0; k < n; ++k) y(k) = eval_g(spec, wf.w(k)) * wf.x(k);
  CircuitSignals s;
  switch (spec.kind) {
    case ElementKind::VCMR:
      s.v = wf.x, s.i = y, s.phi = wf.w, s.q = cumulative_trapezoid(y, wf.dt);
      break;
    case ElementKind::CCMR:
      s.i = wf.x, s.v = y, s.q = wf.w, s.phi = cumulative_trapezoid(y, wf.dt);
      break;
    case ElementKind::QCMC:
      s.q = wf.x, s.v = y, s.i = periodic_derivative(wf.x, wf.dt), s.phi = cumulative_trapezoid(y, wf.dt);
      break;
    case ElementKind::VCMC:
      s.v = wf.x, s.q = y, s.phi = wf.w, s.i = periodic_derivative(y, wf.dt);
      break;
    case ElementKind::FCML:
      s.phi = wf.x, s.i = y, s.q = cumulative_trapezoid(y, wf.dt), s.v = periodic_derivative(wf.x, wf.dt);
      break;
    case ElementKind::CCML:
      s.i = wf.x, s.phi = y, s.q = wf.w, s.v = periodic_derivative(y, wf.dt);
      break;
  }
  return s;
}

VectorXd action_series(const ElementWaveforms& wf, const MemElementSpec<double>& spec) {
  const Index n = wf.w.size();
  VectorXd G(n), out = VectorXd::Zero(n);
  for (Index k = 0; k < n; ++k) G(k) = eval_G(spec, wf.w(k));
  for (Index k = 1; k < n; ++k) out(k) = out(k - 1) + 0.5 * (G(k - 1) + G(k)) * (wf.w(k) - wf.w(k - 1));
  return out;
}

VectorXd coaction_series(const ElementWaveforms& wf, const MemElementSpec<double>& spec) {
  const Index n = wf.w.size();
  VectorXd G(n), out = VectorXd::Zero(n);
  for (Index k = 0; k < n; ++k) G(k) = eval_G(spec, wf.w(k));
  for (Index k = 1; k < n; ++k) out(k) = out(k - 1) + 0.5 * (wf.w(k - 1) + wf.w(k)) * (G(k) - G(k - 1));
  return out;
}

LoopQuantities loop_quantities(const ElementWaveforms& wf, const MemElementSpec<double>& spec) {
  if (wf.x.size() != wf.w.size()) fail_validation("element waveforms: length mismatch");
  if (wf.x.size() < 3) fail_validation("one-period record needs at least 3 samples");
  if (!(wf.dt > 0)) fail_validation("sample step must be positive");
  const Index n = wf.x.size();
  VectorXd G(n), gx(n);
  for (Index k = 0; k < n; ++k) {
    G(k) = eval_G(spec, wf.w(k));
    gx(k) = eval_g(spec, wf.w(k)) * wf.x(k);
  }

  LoopQuantities q;
  q.T = wf.dt * double(n - 1);
  const auto pair = [](const VectorXd& f, const VectorXd& h) {
    return LoopPair{loop_integral(f, h), loop_integral(h, f)};
  };
  q.table2[int(LoopRow::GxX)] = pair(gx, wf.x);
  q.table2[int(LoopRow::XG)] = pair(wf.x, G);
  q.table2[int(LoopRow::GxW)] = pair(gx, wf.w);
  q.table2[int(LoopRow::GW)] = pair(G, wf.w);
  q.table2[int(LoopRow::GxG)] = pair(gx, G);
  q.table2[int(LoopRow::XW)] = pair(wf.x, wf.w);
  q.action = q[LoopRow::GW].f_dh;
  q.coaction = q[LoopRow::GW].h_df;

  const CircuitSignals s = circuit_signals(wf, spec);
  q.v_rms = std::sqrt(trapezoid(s.v.array().square().matrix(), wf.dt) / q.T);
  q.i_rms = std::sqrt(trapezoid(s.i.array().square().matrix(), wf.dt) / q.T);
  q.E_C = loop_integral(s.v, s.q);
  q.E_L = loop_integral(s.i, s.phi);
  return q;
}

ElementWaveforms element_waveforms(const Traj& one_period) {
  if (one_period.size() < 2) fail_validation("one-period record needs at least 2 samples");
  ElementWaveforms wf;
  wf.x = internal_rate_scale(one_period.model) * one_period.column(kX);
  wf.w = one_period.column(kW);
  wf.dt = one_period.step();
  return wf;
}

double closure_error(const Traj& one_period) {
  const Index last = one_period.size() - 1;
  double mismatch = 0, scale = 1;
  for (int c : {kX, kY, kZ, kW}) {
    const auto col = one_period.column(c);
    mismatch = std::max(mismatch, std::abs(col(last) - col(0)));
    scale = std::max(scale, col.cwiseAbs().maxCoeff());
  }
  return mismatch / scale;
}

LoopQuantities table2_quantities(const Traj& one_period, const MemElementSpec<double>& spec, double closure_tol) {
  LoopQuantities q = loop_quantities(element_waveforms(one_period), spec);
  if (closure_error(one_period) > closure_tol) q.warnings.emplace_back("unclosed loop");
  return q;
}

OrbitWindow extract_period(const Traj& traj, const PeriodAnalysis& pa, Index samples, double rtol, double atol) {
  if (pa.crossing_times.empty() || !(pa.T > 0)) fail_validation("extract_period needs a detected period");
  if (samples < 2) fail_validation("samples per period must be >= 2");
  const CircuitModel& model = traj.model;
  const double level = pa.section_level;
  const auto f = [&model](double t, const AugmentedState<double>& s) { return rhs(model, t, s); };
  using Stepper = DormandPrince45<double, kStateDim, decltype(f)>;

  const auto locate = [&](Stepper& dp, double t_stop, double skip_before) -> std::optional<double> {
    while (dp.t() < t_stop) {
      dp.step(t_stop);
      if (dp.y_prev()(kY) < level && dp.y()(kY) >= level && dp.t() > skip_before) {
        const auto g = [&](double t) { return dp.dense(t)(kY) - level; };
        const double tc = bisect_upward(g, dp.t_prev(), dp.t());
        if (tc > skip_before) return tc;
      }
    }
    return std::nullopt;
  };

  const double tc_est = pa.crossing_times.front();
  const Index i0 = std::clamp<Index>(static_cast<Index>(std::floor((tc_est - traj.t0()) / traj.step())) - 1, 0,
                                     traj.size() - 1);
  const double h0 = traj.step();
  Stepper approach(f, traj.times(i0), traj.state(i0), rtol, atol, h0);
  const auto t_star = locate(approach, traj.times(i0) + 3 * pa.T + 4 * h0, -INFINITY);
  if (!t_star) fail_numerical("period refinement failed: section not reached");
  const CoreState<double> start = core_of<double>(approach.dense(*t_star));

  Stepper orbit(f, *t_star, augment(start), rtol, atol, h0);
  const double min_gap = 1e-6 * pa.T / pa.crossings_per_period;
  double t_ret = *t_star;
  for (int m = 0; m < pa.crossings_per_period; ++m) {
    const auto t_next = locate(orbit, *t_star + 3 * pa.T, t_ret + min_gap);
    if (!t_next) fail_numerical("period refinement failed: orbit did not return to the section");
    t_ret = *t_next;
  }

  OrbitWindow out;
  out.T = t_ret - *t_star;
  IntegratorOptions o;
  o.method = Method::DormandPrince45Adaptive;
  o.rtol = rtol;
  o.atol = atol;
  o.t0 = *t_star;
  o.t1 = t_ret;
  o.h = out.T / double(samples);
  OdeSolution<double, kStateDim> sol = solve_ode<double, kStateDim>(f, augment(start), o);
  out.period = Traj{model, std::move(sol.times), std::move(sol.states)};
  out.closure = closure_error(out.period);
  return out;
}

}  // namespace memodyn
