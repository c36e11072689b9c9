#pragma once

#include "memodyn/analysis.hpp"
#include "memodyn/circuits.hpp"
#include "memodyn/integrator.hpp"
#include "memodyn/memelement.hpp"

#include <json.hpp>

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>

namespace memodyn {

using Json = nlohmann::ordered_json;

// JSON mappings; keys are the parameter field names. Readers reject unknown
// keys and wrong types with the dotted key path in the message.

Json to_json(const Polynomial<double>& g);
Json to_json(const RegularChuaParams& p);
Json to_json(const CanonicalChuaParams& p);
Json to_json(const MmoParams& p);
Json to_json(const MemElementSpec<double>& spec);
Json to_json(const IntegratorOptions& o);
Json to_json(const CoreState<double>& s);

Polynomial<double> polynomial_from_json(const Json& j, const std::string& path);
CircuitModel model_from_json(std::string_view name, const Json& params, const std::string& path);
Json params_to_json(const CircuitModel& m);
MemElementSpec<double> element_from_json(const Json& j, const std::string& path);
IntegratorOptions integrator_from_json(const Json& j, const std::string& path);
CoreState<double> core_state_from_json(const Json& j, const std::string& path);

std::string_view method_name(Method m);

struct AnalysisOptions {
  double transient_fraction = 0.5;
  double period_tol = 1e-4;
  double amplitude_threshold = 0.5;
  double closure_tol = 1e-4;
  Eigen::Index samples_per_period = 1 << 19;
  std::optional<MemElementSpec<double>> element;  ///< defaults to VCMR with the circuit's g
};

struct NetlistOptions {
  double R = 1e5;
  double C = 1e-5;
  double period_estimate = 0;
};

/// Everything one run needs; parsed from a JSON config file.
struct RunConfig {
  CircuitModel model = MmoParams{};
  CoreState<double> initial;
  IntegratorOptions integrator = default_integrator();
  AnalysisOptions analysis;
  NetlistOptions netlist;
  std::uint64_t seed = 0;
  Json sweep;  ///< {"grid": {key: [values]}, "random": {"count": n, "ranges": {key: [lo, hi]}}}

  static IntegratorOptions default_integrator() {
    IntegratorOptions o;
    o.t1 = 100.0;
    return o;
  }
};

RunConfig run_config_from_json(const Json& j);
Json to_json(const RunConfig& c);
MemElementSpec<double> analysis_element(const RunConfig& c);

/// JSON text with syntax errors reported as "<source>:line:column: message".
Json parse_json_text(std::string_view text, const std::string& source);
RunConfig load_run_config(const std::string& path);
std::string read_file(const std::string& path);
void write_file(const std::string& path, std::string_view content);

/// CSV with header t,x,y,z,w,I_w,I_gG,I_gGt,I_y,I_z and 17 significant digits.
void write_trajectory_csv(std::ostream& os, const Traj& traj);
/// Whitespace-separated columns with a '#' header line.
void write_plot_columns(std::ostream& os, const Traj& traj);
/// Reads a trajectory CSV; errors name the offending row.
Traj read_trajectory_csv(std::string_view text, const CircuitModel& model);

/// One-period (t, v, i) record.
struct PeriodWaveform {
  Eigen::VectorXd t, v, i;
};
PeriodWaveform read_period_csv(std::string_view text);

std::string format_double(double v);

}  // namespace memodyn
