#include "memodyn/cli.hpp"

#include "memodyn/error.hpp"
#include "memodyn/netlist.hpp"
#include "memodyn/report.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

namespace memodyn {

namespace fs = std::filesystem;

std::string manifest_path(const std::string& csv_path) {
  fs::path p(csv_path);
  p.replace_extension(".manifest.json");
  return p.string();
}

namespace {

struct GlobalFlags {
  std::string config;
  std::string out;
  bool plot_cols = false;
  int threads = 0;
  std::int64_t seed = -1;
};

RunConfig config_or_default(const GlobalFlags& g) {
  RunConfig c = g.config.empty() ? RunConfig{} : load_run_config(g.config);
  if (g.seed >= 0) c.seed = static_cast<std::uint64_t>(g.seed);
  return c;
}

// Model for a trajectory CSV: --config wins, otherwise the run manifest beside it.
RunConfig config_for_csv(const GlobalFlags& g, const std::string& csv) {
  if (!g.config.empty()) return config_or_default(g);
  const std::string manifest = manifest_path(csv);
  if (!fs::exists(manifest))
    fail_validation("no model for '" + csv + "': pass --config or keep " + manifest + " next to it");
  const Json m = parse_json_text(read_file(manifest), manifest);
  if (!m.contains("config")) fail_validation(manifest + ": missing key 'config'");
  return run_config_from_json(m.at("config"));
}

void emit(const Json& j, const std::string& out_path, std::ostream& out) {
  const std::string text = j.dump(2) + "\n";
  if (out_path.empty()) out << text;
  else write_file(out_path, text);
}

bool all_zero(const Traj& traj) {
  return (traj.states.array() == 0.0).all();
}

int cmd_simulate(const GlobalFlags& g, std::ostream& out) {
  const RunConfig c = config_or_default(g);
  const Traj traj = integrate<double>(c.model, c.initial, c.integrator);
  const std::string path = g.out.empty() ? "trajectory.csv" : g.out;
  {
    std::ostringstream csv;
    write_trajectory_csv(csv, traj);
    write_file(path, csv.str());
  }
  if (g.plot_cols) {
    std::ostringstream dat;
    write_plot_columns(dat, traj);
    fs::path p(path);
    p.replace_extension(".dat");
    write_file(p.string(), dat.str());
  }
  const bool equilibrium = all_zero(traj);
  Json manifest;
  manifest["tool"] = "memodyn";
  manifest["version"] = kVersion;
  manifest["command"] = "simulate";
  manifest["output"] = path;
  manifest["rows"] = traj.size();
  manifest["equilibrium"] = equilibrium;
  manifest["config"] = to_json(c);
  write_file(manifest_path(path), manifest.dump(2) + "\n");
  out << "wrote " << traj.size() << " samples to " << path << "\n";
  if (equilibrium) out << "equilibrium: trajectory is identically zero\n";
  return kExitOk;
}

int cmd_analyze(const GlobalFlags& g, const std::string& input, std::ostream& out) {
  const RunConfig c = config_for_csv(g, input);
  const Traj traj = read_trajectory_csv(read_file(input), c.model);
  const Report r = analysis_report(traj, c);
  emit(r.json, g.out, out);
  return r.pass ? kExitOk : kExitValidation;
}

int cmd_verify(const GlobalFlags& g, const std::string& input, std::ostream& out) {
  const RunConfig c = config_for_csv(g, input);
  const Traj traj = read_trajectory_csv(read_file(input), c.model);
  const Report r = verify_report(traj);
  emit(r.json, g.out, out);
  return r.pass ? kExitOk : kExitValidation;
}

int cmd_equivalent(const GlobalFlags& g, const std::string& input, std::ostream& out) {
  const Report r = equivalent_report(read_period_csv(read_file(input)));
  emit(r.json, g.out, out);
  return r.pass ? kExitOk : kExitValidation;
}

int cmd_netlist(const GlobalFlags& g, double period, std::ostream& out) {
  const RunConfig c = config_or_default(g);
  const auto* p = std::get_if<MmoParams>(&c.model);
  if (!p) fail_validation("netlist needs model \"mmo\"");
  NetlistSpec spec;
  spec.params = *p;
  spec.R = c.netlist.R;
  spec.C = c.netlist.C;
  spec.initial = c.initial;
  spec.period_estimate = period > 0 ? period : c.netlist.period_estimate;
  const std::string path = g.out.empty() ? "mmo.cir" : g.out;
  write_file(path, emit_netlist(spec));
  out << "wrote " << path << "\n";
  return kExitOk;
}

unsigned thread_count(const GlobalFlags& g) {
  if (g.threads > 0) return static_cast<unsigned>(g.threads);
  if (const char* env = std::getenv("MEMODYN_THREADS")) {
    char* end = nullptr;
    const long n = std::strtol(env, &end, 10);
    if (end == env || *end != '\0' || n < 1) fail_validation("MEMODYN_THREADS must be a positive integer");
    return static_cast<unsigned>(n);
  }
  return 1;
}

int cmd_sweep(const GlobalFlags& g, std::ostream& out) {
  const RunConfig c = config_or_default(g);
  const std::string table = run_sweep(c, thread_count(g));
  const std::string path = g.out.empty() ? "sweep.csv" : g.out;
  write_file(path, table);
  out << "wrote " << path << "\n";
  return kExitOk;
}

std::string csv_field(std::string s) {
  std::replace(s.begin(), s.end(), ',', ';');
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

std::string evaluate_point(const RunConfig& base, const SweepPoint& point) {
  std::ostringstream row;
  try {
    RunConfig c = base;
    Json params = params_to_json(c.model);
    for (const auto& [key, value] : point.values) params[key] = value;
    c.model = model_from_json(model_name(c.model), params, "params");
    check_stiffness_guard(c.model, c.integrator);
    const Traj traj = integrate<double>(c.model, c.initial, c.integrator);
    const Report a = analysis_report(traj, c);
    const std::vector<Claim> claims = verify_all(traj);
    double newton = 0, jounce = 0, recon = 0;
    bool verified = true;
    for (const Claim& cl : claims) {
      const std::string& id = cl.report.claim_id;
      double& slot = id.find("jounce") != std::string::npos      ? jounce
                     : id.find("reconstruct") != std::string::npos ? recon
                                                                   : newton;
      slot = std::max(slot, cl.report.normalized_max);
      verified = verified && cl.pass;
    }
    row << "ok," << format_double(a.json.at("T").get<double>()) << ','
        << (a.json.at("converged").get<bool>() ? "true" : "false") << ','
        << a.json.at("signature_text").get<std::string>() << ',' << format_double(newton) << ','
        << format_double(jounce) << ',' << format_double(recon) << ',' << (a.pass ? "true" : "false") << ','
        << (verified ? "true" : "false");
  } catch (const std::exception& e) {
    row.str("");
    row << csv_field(e.what()) << ",,,,,,,,";
  }
  return row.str();
}

}  // namespace

std::vector<SweepPoint> sweep_points(const RunConfig& config) {
  std::vector<SweepPoint> points;
  const Json& sweep = config.sweep;
  std::vector<std::pair<std::string, std::vector<double>>> axes;
  if (sweep.contains("grid")) {
    const Json& grid = sweep.at("grid");
    if (!grid.is_object()) fail_validation("config key 'sweep.grid': expected an object");
    for (const auto& [key, values] : grid.items()) {
      if (!values.is_array() || values.empty())
        fail_validation("config key 'sweep.grid." + key + "': expected a non-empty array");
      std::vector<double> v;
      for (const Json& x : values) {
        if (!x.is_number()) fail_validation("config key 'sweep.grid." + key + "': expected numbers");
        v.push_back(x.get<double>());
      }
      axes.emplace_back(key, std::move(v));
    }
  }
  if (!axes.empty()) {
    std::vector<std::size_t> idx(axes.size(), 0);
    for (;;) {
      SweepPoint p;
      for (std::size_t a = 0; a < axes.size(); ++a) p.values.emplace_back(axes[a].first, axes[a].second[idx[a]]);
      points.push_back(std::move(p));
      std::size_t a = axes.size();
      bool carry = true;
      while (carry && a > 0) {
        --a;
        if (++idx[a] < axes[a].second.size()) carry = false;
        else idx[a] = 0;
      }
      if (carry) break;
    }
  }
  if (sweep.contains("random")) {
    const Json& r = sweep.at("random");
    if (!r.is_object() || !r.contains("count") || !r.at("count").is_number_unsigned())
      fail_validation("config key 'sweep.random.count': expected a non-negative integer");
    const auto count = r.at("count").get<std::size_t>();
    std::vector<std::pair<std::string, std::pair<double, double>>> ranges;
    if (r.contains("ranges")) {
      for (const auto& [key, range] : r.at("ranges").items()) {
        if (!range.is_array() || range.size() != 2 || !range[0].is_number() || !range[1].is_number())
          fail_validation("config key 'sweep.random.ranges." + key + "': expected [lo, hi]");
        ranges.emplace_back(key, std::make_pair(range[0].get<double>(), range[1].get<double>()));
      }
    }
    std::mt19937_64 rng(config.seed);
    for (std::size_t n = 0; n < count; ++n) {
      SweepPoint p;
      for (const auto& [key, lohi] : ranges) {
        const double u = std::generate_canonical<double, 53>(rng);
        p.values.emplace_back(key, lohi.first + u * (lohi.second - lohi.first));
      }
      points.push_back(std::move(p));
    }
  }
  if (points.empty()) points.push_back({});
  return points;
}

std::string run_sweep(const RunConfig& config, unsigned threads) {
  const std::vector<SweepPoint> points = sweep_points(config);
  // Reject unknown parameter names before any work starts.
  {
    Json params = params_to_json(config.model);
    for (const SweepPoint& p : points)
      for (const auto& [key, value] : p.values) params[key] = value;
    model_from_json(model_name(config.model), params, "sweep");
  }
  std::vector<std::string> rows(points.size());
  std::atomic<std::size_t> next{0};
  const auto worker = [&] {
    for (std::size_t i = next++; i < points.size(); i = next++) rows[i] = evaluate_point(config, points[i]);
  };
  const unsigned n = std::max(1u, std::min<unsigned>(threads, static_cast<unsigned>(points.size())));
  std::vector<std::thread> pool;
  for (unsigned k = 1; k < n; ++k) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  std::vector<std::string> keys;
  for (const SweepPoint& p : points)
    for (const auto& [key, value] : p.values)
      if (std::find(keys.begin(), keys.end(), key) == keys.end()) keys.push_back(key);

  std::ostringstream os;
  os << "index";
  for (const std::string& key : keys) os << ',' << key;
  os << ",status,T,converged,signature,newton_max,jounce_max,reconstruction_max,analysis_pass,verify_pass\n";
  for (std::size_t i = 0; i < points.size(); ++i) {
    os << i;
    for (const std::string& key : keys) {
      os << ',';
      for (const auto& [k, value] : points[i].values)
        if (k == key) os << format_double(value);
    }
    os << ',' << rows[i] << '\n';
  }
  return os.str();
}

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"memodyn: memristive oscillator simulation, analysis and verification"};
  app.set_version_flag("--version", std::string("memodyn ") + kVersion);
  app.require_subcommand(1);
  app.fallthrough();

  GlobalFlags g;
  app.add_option("--config", g.config, "JSON run configuration");
  app.add_option("--out", g.out, "output path");
  app.add_flag("--plot-cols", g.plot_cols, "also write whitespace-separated columns (.dat)");
  app.add_option("--threads", g.threads, "sweep worker threads (default: MEMODYN_THREADS or 1)")
      ->check(CLI::PositiveNumber);
  app.add_option("--seed", g.seed, "seed for random sweep points")->check(CLI::NonNegativeNumber);

  std::string input;
  double period = 0;
  auto* simulate = app.add_subcommand("simulate", "integrate the configured circuit and write a trajectory CSV");
  auto* analyze = app.add_subcommand("analyze", "period, MMO signature and one-period loop quantities");
  analyze->add_option("input", input, "trajectory CSV")->required();
  auto* verify = app.add_subcommand("verify", "Newtonian, jounce and reconstruction residuals");
  verify->add_option("input", input, "trajectory CSV")->required();
  auto* equivalent = app.add_subcommand("equivalent", "rms-equivalent G-C and R-L circuits of a (t,v,i) period");
  equivalent->add_option("input", input, "one-period CSV with header t,v,i")->required();
  auto* netlist = app.add_subcommand("netlist", "SPICE deck of the op-amp realization");
  netlist->add_option("--period", period, "period estimate (s) used to size .TRAN");
  auto* sweep = app.add_subcommand("sweep", "parameter grid of simulate + analyze + verify");

  std::vector<const char*> argv;
  for (const std::string& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitValidation;
  }

  try {
    if (simulate->parsed()) return cmd_simulate(g, out);
    if (analyze->parsed()) return cmd_analyze(g, input, out);
    if (verify->parsed()) return cmd_verify(g, input, out);
    if (equivalent->parsed()) return cmd_equivalent(g, input, out);
    if (netlist->parsed()) return cmd_netlist(g, period, out);
    if (sweep->parsed()) return cmd_sweep(g, out);
  } catch (const Error& e) {
    err << "memodyn: " << e.what() << "\n";
    return e.kind() == ErrorKind::Numerical ? kExitNumerical : kExitValidation;
  } catch (const std::exception& e) {
    err << "memodyn: " << e.what() << "\n";
    return kExitValidation;
  }
  return kExitValidation;
}

}  // namespace memodyn
