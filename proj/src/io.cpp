#include "memodyn/io.hpp"

#include "memodyn/error.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

namespace memodyn {

using Eigen::Index;

std::string format_double(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

namespace {

[[noreturn]] void key_error(const std::string& path, const std::string& what) {
  fail_validation("config key '" + path + "': " + what);
}

std::string join(const std::string& path, const std::string& key) {
  return path.empty() ? key : path + "." + key;
}

void require_object(const Json& j, const std::string& path) {
  if (!j.is_object()) key_error(path, "expected an object");
}

void reject_unknown(const Json& j, const std::string& path, std::initializer_list<const char*> allowed) {
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) key_error(join(path, key), "unknown key");
  }
}

double number(const Json& j, const std::string& path) {
  if (!j.is_number()) key_error(path, "expected a number");
  return j.get<double>();
}

void read_number(const Json& j, const std::string& path, const char* key, double& out) {
  if (j.contains(key)) out = number(j.at(key), join(path, key));
}

}  // namespace

Json to_json(const Polynomial<double>& g) {
  Json a = Json::array();
  for (Index i = 0; i < g.coefficients().size(); ++i) a.push_back(g.coefficients()(i));
  return a;
}

Json to_json(const RegularChuaParams& p) {
  return {{"k", p.k}, {"alpha", p.alpha}, {"beta", p.beta}, {"gamma", p.gamma}, {"xi", p.xi}, {"g", to_json(p.g)}};
}

Json to_json(const CanonicalChuaParams& p) {
  return {{"k", p.k}, {"alpha", p.alpha}, {"beta", p.beta}, {"gamma", p.gamma}, {"g", to_json(p.g)}};
}

Json to_json(const MmoParams& p) {
  return {{"epsilon", p.epsilon}, {"alpha", p.alpha}, {"K", p.K},     {"beta", p.beta},
          {"eta", p.eta},         {"s_c", p.s_c},     {"a_s", p.a_s}, {"g", to_json(p.g)}};
}

Json to_json(const MemElementSpec<double>& spec) {
  return {{"kind", std::string(to_string(spec.kind))}, {"g", to_json(spec.g)}};
}

std::string_view method_name(Method m) {
  return m == Method::RK4Fixed ? "rk4" : "dopri45";
}

Json to_json(const IntegratorOptions& o) {
  return {{"method", std::string(method_name(o.method))},
          {"h", o.h},
          {"rtol", o.rtol},
          {"atol", o.atol},
          {"t0", o.t0},
          {"t1", o.t1},
          {"record_stride", o.record_stride}};
}

Json to_json(const CoreState<double>& s) {
  return {{"x", s.x}, {"y", s.y}, {"z", s.z}, {"w", s.w}};
}

Polynomial<double> polynomial_from_json(const Json& j, const std::string& path) {
  if (!j.is_array() || j.empty()) key_error(path, "expected a non-empty array of coefficients");
  Polynomial<double>::Coefficients c(static_cast<Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) c(Index(i)) = number(j[i], path + "[" + std::to_string(i) + "]");
  return Polynomial<double>(std::move(c));
}

CircuitModel model_from_json(std::string_view name, const Json& params, const std::string& path) {
  const Json empty = Json::object();
  const Json& j = params.is_null() ? empty : params;
  require_object(j, path);
  const auto poly = [&](Polynomial<double>& g) {
    if (j.contains("g")) g = polynomial_from_json(j.at("g"), join(path, "g"));
  };
  if (name == "regular_chua") {
    reject_unknown(j, path, {"k", "alpha", "beta", "gamma", "xi", "g"});
    RegularChuaParams p;
    read_number(j, path, "k", p.k);
    read_number(j, path, "alpha", p.alpha);
    read_number(j, path, "beta", p.beta);
    read_number(j, path, "gamma", p.gamma);
    read_number(j, path, "xi", p.xi);
    poly(p.g);
    validate(p);
    return p;
  }
  if (name == "canonical_chua") {
    reject_unknown(j, path, {"k", "alpha", "beta", "gamma", "g"});
    CanonicalChuaParams p;
    read_number(j, path, "k", p.k);
    read_number(j, path, "alpha", p.alpha);
    read_number(j, path, "beta", p.beta);
    read_number(j, path, "gamma", p.gamma);
    poly(p.g);
    validate(p);
    return p;
  }
  if (name == "mmo") {
    reject_unknown(j, path, {"epsilon", "alpha", "K", "beta", "eta", "s_c", "a_s", "g"});
    MmoParams p;
    read_number(j, path, "epsilon", p.epsilon);
    read_number(j, path, "alpha", p.alpha);
    read_number(j, path, "K", p.K);
    read_number(j, path, "beta", p.beta);
    read_number(j, path, "eta", p.eta);
    read_number(j, path, "s_c", p.s_c);
    read_number(j, path, "a_s", p.a_s);
    poly(p.g);
    validate(p);
    return p;
  }
  fail_validation("config key 'model': unknown model '" + std::string(name) +
                  "' (expected regular_chua, canonical_chua or mmo)");
}

Json params_to_json(const CircuitModel& m) {
  return std::visit([](const auto& p) { return to_json(p); }, m);
}

MemElementSpec<double> element_from_json(const Json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"kind", "g"});
  MemElementSpec<double> spec;
  if (!j.contains("kind") || !j.at("kind").is_string()) key_error(join(path, "kind"), "expected a string");
  spec.kind = parse_element_kind(j.at("kind").get<std::string>());
  if (!j.contains("g")) key_error(join(path, "g"), "missing");
  spec.g = polynomial_from_json(j.at("g"), join(path, "g"));
  return spec;
}

IntegratorOptions integrator_from_json(const Json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"method", "h", "rtol", "atol", "t0", "t1", "record_stride"});
  IntegratorOptions o = RunConfig::default_integrator();
  if (j.contains("method")) {
    const Json& m = j.at("method");
    if (!m.is_string()) key_error(join(path, "method"), "expected a string");
    const std::string name = m.get<std::string>();
    if (name == "rk4") o.method = Method::RK4Fixed;
    else if (name == "dopri45") o.method = Method::DormandPrince45Adaptive;
    else key_error(join(path, "method"), "expected \"rk4\" or \"dopri45\"");
  }
  read_number(j, path, "h", o.h);
  read_number(j, path, "rtol", o.rtol);
  read_number(j, path, "atol", o.atol);
  read_number(j, path, "t0", o.t0);
  read_number(j, path, "t1", o.t1);
  if (j.contains("record_stride")) {
    const Json& s = j.at("record_stride");
    if (!s.is_number_integer()) key_error(join(path, "record_stride"), "expected an integer");
    o.record_stride = s.get<int>();
  }
  validate(o);
  return o;
}

CoreState<double> core_state_from_json(const Json& j, const std::string& path) {
  require_object(j, path);
  reject_unknown(j, path, {"x", "y", "z", "w"});
  CoreState<double> s;
  read_number(j, path, "x", s.x);
  read_number(j, path, "y", s.y);
  read_number(j, path, "z", s.z);
  read_number(j, path, "w", s.w);
  return s;
}

RunConfig run_config_from_json(const Json& j) {
  require_object(j, "");
  reject_unknown(j, "", {"model", "params", "initial", "integrator", "analysis", "netlist", "seed", "sweep"});
  RunConfig c;
  std::string model = "mmo";
  if (j.contains("model")) {
    if (!j.at("model").is_string()) key_error("model", "expected a string");
    model = j.at("model").get<std::string>();
  }
  c.model = model_from_json(model, j.contains("params") ? j.at("params") : Json(), "params");
  if (j.contains("initial")) c.initial = core_state_from_json(j.at("initial"), "initial");
  if (j.contains("integrator")) c.integrator = integrator_from_json(j.at("integrator"), "integrator");
  check_stiffness_guard(c.model, c.integrator);

  if (j.contains("analysis")) {
    const Json& a = j.at("analysis");
    require_object(a, "analysis");
    reject_unknown(a, "analysis",
                   {"transient_fraction", "period_tol", "amplitude_threshold", "closure_tol", "samples_per_period",
                    "element"});
    read_number(a, "analysis", "transient_fraction", c.analysis.transient_fraction);
    read_number(a, "analysis", "period_tol", c.analysis.period_tol);
    read_number(a, "analysis", "amplitude_threshold", c.analysis.amplitude_threshold);
    read_number(a, "analysis", "closure_tol", c.analysis.closure_tol);
    if (a.contains("samples_per_period")) {
      const Json& n = a.at("samples_per_period");
      if (!n.is_number_integer() || n.get<long long>() < 2)
        key_error("analysis.samples_per_period", "expected an integer >= 2");
      c.analysis.samples_per_period = n.get<Index>();
    }
    if (a.contains("element")) c.analysis.element = element_from_json(a.at("element"), "analysis.element");
  }
  if (j.contains("netlist")) {
    const Json& n = j.at("netlist");
    require_object(n, "netlist");
    reject_unknown(n, "netlist", {"R", "C", "period_estimate"});
    read_number(n, "netlist", "R", c.netlist.R);
    read_number(n, "netlist", "C", c.netlist.C);
    read_number(n, "netlist", "period_estimate", c.netlist.period_estimate);
  }
  if (j.contains("seed")) {
    if (!j.at("seed").is_number_unsigned()) key_error("seed", "expected a non-negative integer");
    c.seed = j.at("seed").get<std::uint64_t>();
  }
  if (j.contains("sweep")) {
    c.sweep = j.at("sweep");
    require_object(c.sweep, "sweep");
  }
  return c;
}

MemElementSpec<double> analysis_element(const RunConfig& c) {
  if (c.analysis.element) return *c.analysis.element;
  return {ElementKind::VCMR, memductance(c.model)};
}

Json to_json(const RunConfig& c) {
  Json j;
  j["model"] = std::string(model_name(c.model));
  j["params"] = params_to_json(c.model);
  j["initial"] = to_json(c.initial);
  j["integrator"] = to_json(c.integrator);
  j["analysis"] = {{"transient_fraction", c.analysis.transient_fraction},
                   {"period_tol", c.analysis.period_tol},
                   {"amplitude_threshold", c.analysis.amplitude_threshold},
                   {"closure_tol", c.analysis.closure_tol},
                   {"samples_per_period", c.analysis.samples_per_period},
                   {"element", to_json(analysis_element(c))}};
  j["netlist"] = {{"R", c.netlist.R}, {"C", c.netlist.C}, {"period_estimate", c.netlist.period_estimate}};
  j["seed"] = c.seed;
  if (!c.sweep.is_null()) j["sweep"] = c.sweep;
  return j;
}

Json parse_json_text(std::string_view text, const std::string& source) {
  try {
    return Json::parse(text.begin(), text.end());
  } catch (const nlohmann::json::parse_error& e) {
    std::size_t line = 1, col = 1;
    for (std::size_t k = 0; k + 1 < e.byte && k < text.size(); ++k) {
      if (text[k] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
    std::string msg = e.what();
    const auto pos = msg.find("parse error");
    if (pos != std::string::npos) msg = msg.substr(pos);
    fail_validation(source + ":" + std::to_string(line) + ":" + std::to_string(col) + ": " + msg);
  }
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail_validation("cannot open '" + path + "'");
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_file(const std::string& path, std::string_view content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail_validation("cannot write '" + path + "'");
  out << content;
  if (!out) fail_validation("write failed for '" + path + "'");
}

RunConfig load_run_config(const std::string& path) {
  return run_config_from_json(parse_json_text(read_file(path), path));
}

namespace {

constexpr std::string_view kTrajectoryHeader = "t,x,y,z,w,I_w,I_gG,I_gGt,I_y,I_z";

struct CsvTable {
  std::vector<std::vector<double>> rows;
  std::vector<int> lines;
};

CsvTable read_csv(std::string_view text, std::string_view header, std::size_t columns) {
  std::istringstream in{std::string(text)};
  std::string line;
  int number = 0;
  CsvTable table;
  bool seen_header = false;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!seen_header) {
      if (line != header)
        fail_validation("CSV row " + std::to_string(number) + ": expected header '" + std::string(header) + "'");
      seen_header = true;
      continue;
    }
    std::vector<double> row;
    std::size_t start = 0;
    for (;;) {
      const std::size_t comma = line.find(',', start);
      const std::string field = line.substr(start, comma == std::string::npos ? std::string::npos : comma - start);
      char* end = nullptr;
      const double v = std::strtod(field.c_str(), &end);
      if (field.empty() || end != field.c_str() + field.size() || !std::isfinite(v))
        fail_validation("CSV row " + std::to_string(number) + ", column " + std::to_string(row.size() + 1) +
                        ": not a finite number '" + field + "'");
      row.push_back(v);
      if (comma == std::string::npos) break;
      start = comma + 1;
    }
    if (row.size() != columns)
      fail_validation("CSV row " + std::to_string(number) + ": expected " + std::to_string(columns) + " fields, got " +
                      std::to_string(row.size()));
    table.rows.push_back(std::move(row));
    table.lines.push_back(number);
  }
  if (!seen_header) fail_validation("CSV: missing header");
  if (table.rows.size() < 2) fail_validation("CSV: need at least 2 data rows");
  const double t0 = table.rows.front()[0], t1 = table.rows.back()[0];
  const double n = double(table.rows.size() - 1);
  if (!(t1 > t0)) fail_validation("CSV: times must increase");
  for (std::size_t k = 0; k < table.rows.size(); ++k) {
    const double expected = t0 + (t1 - t0) * double(k) / n;
    if (std::abs(table.rows[k][0] - expected) > 1e-9 * (t1 - t0))
      fail_validation("CSV row " + std::to_string(table.lines[k]) + ": times are not uniformly spaced");
  }
  return table;
}

}  // namespace

void write_trajectory_csv(std::ostream& os, const Traj& traj) {
  os << kTrajectoryHeader << '\n';
  for (Index i = 0; i < traj.size(); ++i) {
    os << format_double(traj.times(i));
    for (int c = 0; c < kStateDim; ++c) os << ',' << format_double(traj.states(i, c));
    os << '\n';
  }
}

void write_plot_columns(std::ostream& os, const Traj& traj) {
  os << "# t";
  for (std::string_view name : kStateNames) os << ' ' << name;
  os << '\n';
  for (Index i = 0; i < traj.size(); ++i) {
    os << format_double(traj.times(i));
    for (int c = 0; c < kStateDim; ++c) os << ' ' << format_double(traj.states(i, c));
    os << '\n';
  }
}

Traj read_trajectory_csv(std::string_view text, const CircuitModel& model) {
  const CsvTable table = read_csv(text, kTrajectoryHeader, kStateDim + 1);
  Traj traj{model, {}, {}};
  const Index n = static_cast<Index>(table.rows.size());
  traj.times.resize(n);
  traj.states.resize(n, kStateDim);
  for (Index i = 0; i < n; ++i) {
    traj.times(i) = table.rows[i][0];
    for (int c = 0; c < kStateDim; ++c) traj.states(i, c) = table.rows[i][c + 1];
  }
  return traj;
}

PeriodWaveform read_period_csv(std::string_view text) {
  const CsvTable table = read_csv(text, "t,v,i", 3);
  PeriodWaveform wf;
  const Index n = static_cast<Index>(table.rows.size());
  wf.t.resize(n);
  wf.v.resize(n);
  wf.i.resize(n);
  for (Index k = 0; k < n; ++k) {
    wf.t(k) = table.rows[k][0];
    wf.v(k) = table.rows[k][1];
    wf.i(k) = table.rows[k][2];
  }
  return wf;
}

}  // namespace memodyn
