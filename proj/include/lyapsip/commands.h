#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

namespace lyapsip {

/// Exit codes shared by every command.
enum ExitCode : int { kExitOk = 0, kExitInputError = 1, kExitNegative = 2 };

struct CommandOptions {
  std::string config;  // path; optional for verify/curves when the cert embeds one
  std::string cert;    // path
  std::string out;     // output directory; empty means the config's output.dir
  std::optional<std::uint64_t> seed;
  std::optional<int> grid;
  std::optional<int> restarts;
  /// Comma/space separated radii, or a single integer count of evenly
  /// spaced radii in (0, max |y| over N].
  std::string radii;
};

/// Synthesizes and writes certificate.json, convergence.csv and report.json.
/// 0 certified, 2 not found, 1 input error.
int CmdSynth(const CommandOptions& opts, std::ostream& out, std::ostream& err);

/// Verifies a certificate and tabulates the sphere curves; writes report.json
/// and curves.csv. 0 verified, 2 violated or inconclusive, 1 input error.
int CmdVerify(const CommandOptions& opts, std::ostream& out, std::ostream& err);

/// Writes curves.csv for the given radii. 0 on success, 1 on input error.
int CmdCurves(const CommandOptions& opts, std::ostream& out, std::ostream& err);

/// Parses a radii spec over (0, r_max]; throws ConfigError("radii", ...).
std::vector<double> ParseRadii(const std::string& spec, double r_max);

}  // namespace lyapsip
