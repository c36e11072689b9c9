#pragma once

#include "memodyn/integrator.hpp"
#include "memodyn/memelement.hpp"

#include <Eigen/Dense>

#include <array>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace memodyn {

using Traj = Trajectory<double>;

/// One L^s block: L large oscillations followed by s small ones.
struct MmoBlock {
  int large = 0;
  int small = 0;
  friend bool operator==(const MmoBlock&, const MmoBlock&) = default;
};
using MmoSignature = std::vector<MmoBlock>;

/// "1^2 2^1" style rendering.
std::string to_string(const MmoSignature& sig);

struct PeriodAnalysis {
  double T = 0.0;
  double samples_per_period = 0.0;
  MmoSignature mmo_signature;
  bool converged = false;
  int crossings_per_period = 1;  ///< section crossings within one period
  double section_level = 0.0;    ///< y level of the Poincare section
  std::vector<double> crossing_times;  ///< upward section crossings after the transient
};

/// Period from the return times of upward crossings of y = mean(y) after
/// discarding the leading `transient_fraction` of the samples. Mixed-mode
/// orbits cross the section several times per period; the smallest
/// multiplicity whose return times agree within `tol` (relative) wins.
PeriodAnalysis detect_period(const Traj& traj, double transient_fraction = 0.5, double tol = 1e-4);

/// Classifies local maxima of x in [window_start, window_start + period) as
/// large or small and run-length encodes the result. A peak's amplitude is
/// its descent to the higher of its two neighbouring troughs; it is large
/// when that is at least `amplitude_threshold` times the largest amplitude in
/// the window. Default window: the last full period that ends half a period
/// before the end of the trajectory.
MmoSignature classify_mmo(const Traj& traj, double period, double amplitude_threshold = 0.5,
                          std::optional<double> window_start = {});

/// Same, with the window anchored at the last section crossing that leaves
/// room for a full period.
MmoSignature classify_mmo(const Traj& traj, const PeriodAnalysis& pa, double amplitude_threshold = 0.5);

/// Composite trapezoid on a uniform grid.
double trapezoid(const Eigen::Ref<const Eigen::VectorXd>& values, double dt);
Eigen::VectorXd cumulative_trapezoid(const Eigen::Ref<const Eigen::VectorXd>& values, double dt);

/// \int f dh along the sampled polyline: sum of f_mid * delta h.
double loop_integral(const Eigen::Ref<const Eigen::VectorXd>& f, const Eigen::Ref<const Eigen::VectorXd>& h);

enum class LoopRow { GxX = 0, XG, GxW, GW, GxG, XW };
inline constexpr std::array<LoopRow, 6> kLoopRows = {LoopRow::GxX, LoopRow::XG, LoopRow::GxW,
                                                     LoopRow::GW,  LoopRow::GxG, LoopRow::XW};
/// Key naming the (f, h) pair, e.g. "gx_x" for (g(w)x, x).
std::string_view row_key(LoopRow row);

struct LoopPair {
  double f_dh = 0.0;
  double h_df = 0.0;
  double sum() const { return f_dh + h_df; }
};

struct LoopQuantities {
  std::array<LoopPair, 6> table2{};
  double T = 0.0;
  double action = 0.0;
  double coaction = 0.0;
  double v_rms = 0.0;
  double i_rms = 0.0;
  double E_C = 0.0;
  double E_L = 0.0;
  std::vector<std::string> warnings;

  const LoopPair& operator[](LoopRow row) const { return table2[static_cast<int>(row)]; }
};

/// Mem-element signals over one closed period on a uniform grid
/// (first and last samples describe the same phase).
struct ElementWaveforms {
  Eigen::VectorXd x;  ///< input
  Eigen::VectorXd w;  ///< internal variable
  double dt = 0.0;
};

/// Voltage/current/flux/charge of the element, mapped from (x, y, w) by kind.
struct CircuitSignals {
  Eigen::VectorXd v, i, phi, q;
};
CircuitSignals circuit_signals(const ElementWaveforms& wf, const MemElementSpec<double>& spec);

LoopQuantities loop_quantities(const ElementWaveforms& wf, const MemElementSpec<double>& spec);

/// Input is dw/dt of the circuit (so that w' = x holds exactly), w the memristor state.
ElementWaveforms element_waveforms(const Traj& one_period);

/// All Table-2 integrals, action/coaction, rms values and one-period energies.
/// Adds an "unclosed loop" warning when the end state differs from the start
/// by more than closure_tol (relative).
LoopQuantities table2_quantities(const Traj& one_period, const MemElementSpec<double>& spec,
                                 double closure_tol = 1e-4);

/// Running action A(t) = \int G(w) dw and coaction \int w dG(w) along the samples.
Eigen::VectorXd action_series(const ElementWaveforms& wf, const MemElementSpec<double>& spec);
Eigen::VectorXd coaction_series(const ElementWaveforms& wf, const MemElementSpec<double>& spec);

/// Largest core-state mismatch between first and last sample, relative to max(1, |state|).
double closure_error(const Traj& one_period);

struct OrbitWindow {
  double T = 0.0;  ///< refined period
  Traj period;     ///< samples + 1 points from one section crossing to the next equivalent one
  double closure = 0.0;
};

/// Re-integrates one period starting exactly on the Poincare section, with the
/// section crossings located on the integrator's dense output.
OrbitWindow extract_period(const Traj& traj, const PeriodAnalysis& pa, Eigen::Index samples,
                           double rtol = 1e-11, double atol = 1e-13);

}  // namespace memodyn
