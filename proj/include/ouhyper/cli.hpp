#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "ouhyper/report.hpp"

namespace ouhyper::cli {

/// Stable process exit codes.
enum ExitCode : int {
  kPass = 0,
  kCheckFailed = 1,
  kConfigError = 2,
  kNumericError = 3,
};

/// Every setting a run can take, with the config-file section it lives in.
struct KeyInfo {
  std::string key;
  std::string section;
  bool repeatable = false;
  std::string help;
};

const std::vector<KeyInfo>& known_keys();

/// Resolved settings of one invocation. Values are kept as text and parsed
/// on access so that reports can echo exactly what was given.
struct RunConfig {
  std::string command;
  std::optional<std::string> config_path;
  std::string output;  // empty writes to stdout
  std::string format = "json";
  std::map<std::string, std::vector<std::string>> values;

  bool has(const std::string& key) const;
  std::string text(const std::string& key, const std::string& fallback) const;
  double real(const std::string& key, double fallback) const;
  int integer(const std::string& key, int fallback) const;
  bool flag(const std::string& key, bool fallback) const;
  std::uint64_t seed() const;
  /// Comma-separated reals.
  std::vector<double> reals(const std::string& key, const std::vector<double>& fallback) const;
  /// All values of a repeatable key.
  std::vector<std::string> all(const std::string& key) const;

  /// Replaces (or for append, extends) a key. Accepts "key" or
  /// "section.key"; generator axes use "c.<param>". Throws ConfigError on
  /// unknown keys.
  void set(const std::string& key, const std::string& value, bool append = false);
};

/// Reads a config file: "[section]" headers and "key = value" lines, '#'
/// comments. Keys must belong to their section. Throws ConfigError.
void load_config_file(const std::string& path, RunConfig& config);

/// Parses a 64-bit seed in decimal or 0x-prefixed hex.
std::uint64_t parse_seed(const std::string& text);

/// Runs one command and returns its report. Throws library errors.
Report execute(const RunConfig& config, int& exit_code);

/// Full entry point: parses argv, runs, writes the report, maps errors to
/// exit codes. Diagnostics go to err.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ouhyper::cli
