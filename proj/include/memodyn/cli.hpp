#pragma once

#include "memodyn/io.hpp"

#include <iosfwd>
#include <string>
#include <vector>

namespace memodyn {

inline constexpr const char* kVersion = "1.0.0";

/// Exit codes of the command-line tool.
enum ExitCode : int { kExitOk = 0, kExitValidation = 2, kExitNumerical = 3 };

/// Runs the memodyn command line (args[0] is the program name).
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "<dir>/run.csv" -> "<dir>/run.manifest.json".
std::string manifest_path(const std::string& csv_path);

/// One parameter point of a sweep: key/value overrides of the model parameters.
struct SweepPoint {
  std::vector<std::pair<std::string, double>> values;
};

/// Cartesian grid (last key fastest) followed by seeded random points.
std::vector<SweepPoint> sweep_points(const RunConfig& config);

/// Sweep table as CSV text; rows in point order regardless of thread count.
std::string run_sweep(const RunConfig& config, unsigned threads);

}  // namespace memodyn
