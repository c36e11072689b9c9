#include "memodyn/report.hpp"

#include <cmath>

namespace memodyn {

namespace {

bool within(double value, double reference, double tol) {
  return std::abs(value) <= tol * (std::abs(reference) + 1.0);
}

constexpr double kIdentityTol = 1e-6;

}  // namespace

Json to_json(const MmoSignature& sig) {
  Json a = Json::array();
  for (const MmoBlock& b : sig) a.push_back(Json::array({b.large, b.small}));
  return a;
}

Json to_json(const LoopQuantities& q) {
  Json table = Json::object();
  for (LoopRow row : kLoopRows) {
    const LoopPair& p = q[row];
    table[std::string(row_key(row))] = {{"f_dh", p.f_dh}, {"h_df", p.h_df}, {"sum", p.sum()}};
  }
  return {{"T", q.T},         {"table2", table}, {"action", q.action}, {"coaction", q.coaction},
          {"v_rms", q.v_rms}, {"i_rms", q.i_rms}, {"E_C", q.E_C},       {"E_L", q.E_L},
          {"warnings", q.warnings}};
}

Json to_json(const ResidualReport& r) {
  return {{"claim_id", r.claim_id},
          {"max_abs", r.max_abs},
          {"rms_residual", r.rms_residual},
          {"normalization", r.normalization},
          {"normalized_max", r.normalized_max}};
}

Report analysis_report(const Traj& traj, const RunConfig& config) {
  const AnalysisOptions& o = config.analysis;
  const PeriodAnalysis pa = detect_period(traj, o.transient_fraction, o.period_tol);
  const MmoSignature sig = classify_mmo(traj, pa, o.amplitude_threshold);
  const OrbitWindow orbit =
      extract_period(traj, pa, o.samples_per_period, config.integrator.rtol, config.integrator.atol);
  const MemElementSpec<double> element = analysis_element(config);
  const ElementWaveforms wf = element_waveforms(orbit.period);
  LoopQuantities q = loop_quantities(wf, element);
  if (orbit.closure > o.closure_tol) q.warnings.emplace_back("unclosed loop");

  Json checks = Json::object();
  bool pass = pa.converged && q.warnings.empty();
  checks["period_converged"] = pa.converged;
  checks["loop_closed"] = orbit.closure <= o.closure_tol;
  bool pairs = true;
  for (LoopRow row : kLoopRows) pairs = pairs && within(q[row].sum(), q[row].f_dh, kIdentityTol);
  checks["pair_sums"] = pairs;
  const bool action = within(q.action + q.coaction, q.action, kIdentityTol);
  checks["action_coaction"] = action;
  pass = pass && pairs && action;

  // rms identities hold where flux (charge) is the running integral of v (i).
  const CircuitSignals s = circuit_signals(wf, element);
  const ElementKind k = element.kind;
  const bool phi_integrates_v = k == ElementKind::VCMR || k == ElementKind::CCMR || k == ElementKind::QCMC ||
                                k == ElementKind::VCMC;
  const bool q_integrates_i = k == ElementKind::VCMR || k == ElementKind::CCMR || k == ElementKind::FCML ||
                              k == ElementKind::CCML;
  const double v_dphi = loop_integral(s.v, s.phi), i_dq = loop_integral(s.i, s.q);
  const double v_target = q.T * q.v_rms * q.v_rms, i_target = q.T * q.i_rms * q.i_rms;
  Json rms = {{"v_dphi", v_dphi}, {"T_v_rms_sq", v_target}, {"i_dq", i_dq}, {"T_i_rms_sq", i_target}};
  if (phi_integrates_v) {
    const bool ok = within(v_dphi - v_target, v_target, kIdentityTol);
    checks["rms_v"] = ok;
    pass = pass && ok;
  }
  if (q_integrates_i) {
    const bool ok = within(i_dq - i_target, i_target, kIdentityTol);
    checks["rms_i"] = ok;
    pass = pass && ok;
  }

  Json j;
  j["model"] = std::string(model_name(traj.model));
  j["T"] = orbit.T;
  j["T_detected"] = pa.T;
  j["converged"] = pa.converged;
  j["crossings_per_period"] = pa.crossings_per_period;
  j["samples_per_period"] = o.samples_per_period;
  j["signature"] = to_json(sig);
  j["signature_text"] = to_string(sig);
  j["element"] = to_json(element);
  j["closure"] = orbit.closure;
  const Json lq = to_json(q);
  for (const auto& [key, value] : lq.items()) {
    if (key != "T") j[key] = value;
  }
  j["rms_identities"] = rms;
  j["checks"] = checks;
  j["pass"] = pass;
  return {j, pass};
}

Report verify_report(const Traj& traj) {
  const std::vector<Claim> claims = verify_all(traj);
  Json list = Json::array();
  bool pass = true;
  for (const Claim& c : claims) {
    Json item = to_json(c.report);
    item["tolerance"] = c.tolerance;
    item["pass"] = c.pass;
    list.push_back(item);
    pass = pass && c.pass;
  }
  Json j;
  j["model"] = std::string(model_name(traj.model));
  j["samples"] = traj.size();
  j["claims"] = list;
  j["pass"] = pass;
  return {j, pass};
}

Report equivalent_report(const PeriodWaveform& wf) {
  const double T = wf.t(wf.t.size() - 1) - wf.t(0);
  const LinearEquivalent gc = gc_equivalent(wf.v, wf.i, T);
  const LinearEquivalent rl = rl_equivalent(wf.v, wf.i, T);
  const double v_rms = std::sqrt(gc.v_sq / T), i_rms = std::sqrt(gc.i_sq / T);

  const double gc_identity = identity_residual(gc), rl_identity = identity_residual(rl);
  const double gc_rms = std::abs(sinusoidal_response_rms(gc, v_rms) - i_rms);
  const double rl_rms = std::abs(sinusoidal_response_rms(rl, i_rms) - v_rms);
  Json checks = {
      {"gc_identity", gc_identity <= 1e-10 * (gc.i_sq / gc.v_sq + 1)},
      {"rl_identity", rl_identity <= 1e-10 * (rl.v_sq / rl.i_sq + 1)},
      {"radicand_nonnegative", gc.radicand >= -1e-12 * gc.v_sq * gc.i_sq},
      {"gc_rms_match", gc_rms <= 1e-8 * (i_rms + 1)},
      {"rl_rms_match", rl_rms <= 1e-8 * (v_rms + 1)},
  };
  bool pass = true;
  for (const auto& [key, value] : checks.items()) pass = pass && value.get<bool>();

  Json j = {{"G", gc.resistive}, {"C", gc.reactive}, {"R", rl.resistive}, {"L", rl.reactive},
            {"T", T},            {"v_rms", v_rms},   {"i_rms", i_rms},     {"E", gc.energy},
            {"Y", gc.magnitude}, {"Z", rl.magnitude}, {"radicand", gc.radicand}, {"checks", checks},
            {"pass", pass}};
  return {j, pass};
}

}  // namespace memodyn
