#pragma once

#include "memodyn/analysis.hpp"
#include "memodyn/circuits.hpp"
#include "memodyn/state.hpp"
#include "memodyn/taylor.hpp"

#include <Eigen/Dense>

#include <array>
#include <string>
#include <vector>

namespace memodyn {

// Newtonian formulations w'' = F(t, w, w')/m with m = 1. The memory integrals
// start at zero at t0, so every force carries constants fixed by the state at
// t0 (the anchor): the printed indefinite integrals are made definite.

/// Memory integrals of one trajectory sample.
struct Memory {
  double I_w = 0, I_gG = 0, I_gGt = 0, I_y = 0, I_z = 0;
};
Memory memory_of(const AugmentedState<double>& s);

/// Start time and core state (stored coordinates) at which the memory integrals vanish.
struct Anchor {
  double t0 = 0;
  CoreState<double> core;
};
Anchor anchor_of(const Traj& traj);

/// Arguments of a force: the Newtonian variable (w, x, y or z, physical units)
/// and its rate, the memristor state w feeding g(w), and the memory integrals
/// of the same sample.
struct ForceContext {
  double t = 0;
  double value = 0;
  double rate = 0;
  double w = 0;
  Memory memory;
  Anchor anchor;
};

double force_regular_chua(const ForceContext& ctx, const RegularChuaParams& p);
double force_canonical_chua(const ForceContext& ctx, const CanonicalChuaParams& p);
double force_mmo_w(const ForceContext& ctx, const MmoParams& p);
/// Physical x = eta * xbar; ctx.w is the reconstructed memristor state.
double force_mmo_x(const ForceContext& ctx, const MmoParams& p);
double force_mmo_y(const ForceContext& ctx, const MmoParams& p);
double force_mmo_z(const ForceContext& ctx, const MmoParams& p);

/// w = w0 + (y - y0)/alpha + s_c K I_y + s_c I_z - s_c a_s (t - t0).
double reconstruct_w_from_y(const MmoParams& p, double t, double y, const Memory& m, const Anchor& a);
/// w = w0 - (z' - z0')/(s_c alpha beta) - (K/beta)(z - z0) + s_c I_z - s_c a_s (t - t0), z' = -s_c beta y.
double reconstruct_w_from_z(const MmoParams& p, double t, double y, double z, const Memory& m, const Anchor& a);

/// Per-sample reconstructions along an MMO trajectory. From x: w = w0 + s_c \int x dt
/// with physical x, integrated by the endpoint-corrected trapezoid rule.
Eigen::VectorXd reconstruct_w_from_x(const Traj& traj);
Eigen::VectorXd reconstruct_w_from_y(const Traj& traj);
Eigen::VectorXd reconstruct_w_from_z(const Traj& traj);

/// Value and first four time derivatives of each core state at one point.
/// For the MMO model x is reported in physical units.
struct DerivativeChain {
  std::array<double, 5> x{}, y{}, z{}, w{};
};

/// Exact derivatives by pushing truncated Taylor series through the core
/// right-hand side (repeated substitution of the ODE). Entries above `order`
/// are left at zero.
DerivativeChain derivative_chain(const CircuitModel& model, const CoreState<double>& s, int order = 4);

/// Coefficients of a jounce equation c4 w'''' + c3 w''' + c2 w'' + c1 w' + c0 = 0
/// at given (w, w').
struct JounceTerms {
  double c4 = 0, c3 = 0, c2 = 0, c1 = 0, c0 = 0;
  double residual(double w1, double w2, double w3, double w4) const {
    return c4 * w4 + c3 * w3 + c2 * w2 + c1 * w1 + c0;
  }
};
JounceTerms jounce_terms(const CanonicalChuaParams& p, double w, double w_dot);
JounceTerms jounce_terms(const MmoParams& p, double w, double w_dot);

struct ResidualReport {
  std::string claim_id;
  Eigen::VectorXd residuals;
  double max_abs = 0;
  double rms_residual = 0;
  double normalization = 1;  ///< max(1, max |second derivative| or |w|)
  double normalized_max = 0;
};
ResidualReport make_report(std::string claim_id, Eigen::VectorXd residuals, double scale);

enum class Variable { W, X, Y, Z };

/// Second derivative from the chain minus F/m at every sample.
ResidualReport newtonian_residual(const Traj& traj, Variable v = Variable::W);
ResidualReport jounce_residual_canonical(const Traj& traj, const CanonicalChuaParams& p);
ResidualReport jounce_residual_mmo(const Traj& traj, const MmoParams& p);
/// Reconstructed w minus the trajectory's w (MMO only; X, Y or Z).
ResidualReport reconstruction_residual(const Traj& traj, Variable from);

struct Claim {
  ResidualReport report;
  double tolerance = 0;
  bool pass = false;
};

inline constexpr double kNewtonTolerance = 1e-5;
inline constexpr double kReconstructionTolerance = 1e-6;

/// Every claim that applies to the trajectory's model. The MMO jounce claim
/// is included only for a_s = 0.
std::vector<Claim> verify_all(const Traj& traj);

}  // namespace memodyn
