#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace beltrami {

/// Everything a beltrami_lab run needs. Field names mirror the command-line
/// flags; the JSON config file uses the flag names as keys.
struct RunConfig {
  std::string command;

  // dilatation selection: zero | const:<re>[,<im>] | example3 | example4
  std::string mu = "zero";
  double alpha = 0.5;
  /// Truncation level (solve, dilatation) or schedule (truncate).
  std::vector<double> k;
  double p = 1.5;
  std::optional<double> bound;

  // radial
  std::string profile = "example2";
  int n = 2;
  double m = 2.0;
  int pairs = 20;

  // holder
  std::string map = "example3";
  double compact_radius = 0.75;
  double r0 = 0.25;
  int j_min = 3;
  int j_max = 14;
  int pairs_per_scale = 2000;

  // dilatation: auto | one | example1 | example3-inverse | example4-inverse
  std::string q = "auto";

  // solver
  std::size_t grid = 512;
  double half_width = 2.0;
  double fix_tol = 1e-10;
  int max_iter = 200;
  int supersample = 8;
  double residual_tol = 5e-3;

  std::string out = "beltrami_out";
  bool dump = false;
  std::uint64_t seed = 0;
};

/// Parses argv (argv[0] is the program name). Throws ValidationError listing
/// every invalid field; --help and --version are reported through `help`.
RunConfig parse_config(int argc, const char* const* argv, std::string* help = nullptr);

/// Parses JSON text mirroring the flags (must contain "command").
RunConfig parse_config_text(const std::string& json_text);

/// Throws ValidationError with one entry per invalid field.
void validate(const RunConfig& cfg);

/// JSON echo of the configuration.
std::string config_json(const RunConfig& cfg);

/// Runs the command, writing summary.json and CSV tables under cfg.out.
/// Returns 0 when every check passes, 1 when a check fails, 2 on errors.
int run_command(const RunConfig& cfg, std::ostream& log);

/// Full program: parse, run, map errors to exit codes.
int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace beltrami
