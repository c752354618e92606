#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "scolab/analytics.hpp"
#include "scolab/experiments.hpp"
#include "scolab/optimizers.hpp"
#include "scolab/results_io.hpp"

namespace scolab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitComputation = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitViolation = 3;

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "SCOLAB_OUTPUT_DIR";

struct CliConfig {
  std::string subcommand;
  std::string instance;
  std::vector<double> eta;
  std::vector<std::int64_t> T;
  std::vector<std::size_t> n;
  std::size_t replicates = 1;
  std::uint64_t seed = 0;
  std::uint64_t trials = 1000;
  std::optional<double> C;
  Algorithm algorithm = Algorithm::GD;
  std::optional<Conditioning> conditioning;
  std::optional<Event> event;
  std::optional<SweptVariable> swept;
  std::optional<Regime> envelope;
  std::string output;
  Format format = Format::Table;
  bool deterministic = false;
  bool assert_realizable = false;
  bool final_iterate = false;
  std::string input;
  int jobs = 0;
  /// Set when --help was requested; dispatch prints it and exits 0.
  std::optional<std::string> help;

  /// Instance spec with --C folded in.
  InstanceSpec instance_spec() const;
  SweepGrid grid() const;
};

/// Parses arguments (without the program name). Throws UsageError naming the
/// offending flag. `--config <file>` values are overridden by explicit flags.
CliConfig parse_args(const std::vector<std::string>& args);

/// Executes a parsed configuration; returns the process exit code.
int dispatch(const CliConfig& config, std::ostream& out, std::ostream& err);

/// parse_args + dispatch with the exit-code mapping for errors.
int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace scolab::cli
