#pragma once

#include <Eigen/Dense>

#include <string_view>

namespace memodyn {

enum class EquivalentKind { ParallelGC, SeriesRL };

/// Linear two-port with the same one-period energy and rms values as a
/// memristive (v, i) waveform under a sinusoid at 2*pi/T.
///
/// ParallelGC: resistive = G, reactive = C, magnitude = |Y|.
/// SeriesRL:   resistive = R, reactive = L, magnitude = |Z|.
struct LinearEquivalent {
  EquivalentKind kind = EquivalentKind::ParallelGC;
  double resistive = 0;
  double reactive = 0;
  double T = 0;
  double magnitude = 0;
  double energy = 0;        ///< \int v i dt
  double v_sq = 0;          ///< \int v^2 dt
  double i_sq = 0;          ///< \int i^2 dt
  double radicand = 0;      ///< \int v^2 \int i^2 - energy^2 before clamping
};

std::string_view to_string(EquivalentKind kind);

/// G = E / \int v^2, C = T/(2 pi \int v^2) sqrt(\int v^2 \int i^2 - E^2).
LinearEquivalent gc_equivalent(const Eigen::Ref<const Eigen::VectorXd>& v,
                               const Eigen::Ref<const Eigen::VectorXd>& i, double T);

/// R = E / \int i^2, L = T/(2 pi \int i^2) sqrt(\int v^2 \int i^2 - E^2).
LinearEquivalent rl_equivalent(const Eigen::Ref<const Eigen::VectorXd>& v,
                               const Eigen::Ref<const Eigen::VectorXd>& i, double T);

/// |G^2 + (2 pi C/T)^2 - \int i^2/\int v^2| (or the impedance analogue).
double identity_residual(const LinearEquivalent& eq);

/// Phasor response: output rms of the equivalent driven by a sinusoid of rms `input_rms`.
double sinusoidal_response_rms(const LinearEquivalent& eq, double input_rms);

}  // namespace memodyn
