#pragma once

#include <optional>
#include <string>

namespace morsekit {

// Process exit codes of the experiment runner.
inline constexpr int kExitOk = 0;
inline constexpr int kExitConfigParse = 2;
inline constexpr int kExitSpaceConstruction = 3;
inline constexpr int kExitPropertyFailure = 4;

struct CliOptions {
  std::string command;
  std::string config_path;
  std::optional<std::string> out_dir;
  std::optional<uint64_t> seed;
  std::optional<int> grid;
};

/// Run one named experiment from a JSON config. Writes `<out>/<command>.json`
/// and `<out>/<command>.csv`; returns a process exit code. Identical configs
/// and seeds produce byte-identical outputs.
int run_experiment(const CliOptions& options);

/// Known command names, comma separated (for CLI help).
std::string experiment_command_list();

}  // namespace morsekit
