#pragma once

#include "memodyn/analysis.hpp"
#include "memodyn/equivalence.hpp"
#include "memodyn/io.hpp"
#include "memodyn/newtonian.hpp"

namespace memodyn {

/// A JSON report and whether every embedded check passed.
struct Report {
  Json json;
  bool pass = false;
};

/// Period, MMO signature, Table-2 integrals, action/coaction, rms and energies
/// for a simulated trajectory. Throws "non-oscillatory trajectory" when the
/// section is never crossed twice.
Report analysis_report(const Traj& traj, const RunConfig& config);

/// Newtonian, jounce and reconstruction residual claims.
Report verify_report(const Traj& traj);

/// G-C and R-L equivalents of a one-period (t, v, i) record.
Report equivalent_report(const PeriodWaveform& wf);

Json to_json(const MmoSignature& sig);
Json to_json(const LoopQuantities& q);
Json to_json(const ResidualReport& r);

}  // namespace memodyn
