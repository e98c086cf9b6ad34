#pragma once

// The nlscat command-line front end. Each command is also callable directly
// so tests can drive it without spawning a process.

#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>

#include "nlscat/checks.hpp"
#include "nlscat/config.hpp"

namespace nlscat::cli {

namespace fs = std::filesystem;

enum ExitCode : int {
    kOk = 0,
    kConfig = 1,
    kGate = 2,
    kDivergence = 3,
    kIllPosed = 4,
};

/// Exit code for an exception escaping a command.
int exit_code_for(const std::exception& e);

/// Writes u_sc.json, far_field.json, solve_report.txt and effective_config.json.
SolveReport cmd_forward(const RunConfig& cfg, const fs::path& out);
/// Writes dataset.json and effective_config.json. Returns the exit code for
/// failed records (0 when the dataset is complete).
int cmd_synth(const RunConfig& cfg, const fs::path& out);
/// Writes reconstruction.json and residuals.csv.
void cmd_invert(const RunConfig& cfg, const fs::path& dataset, const fs::path& out);
/// Prints a pass/fail table; writes range_probe.json when out is given.
bool cmd_check(const checks::Settings& s, const std::string& filter, const std::optional<fs::path>& out,
               std::ostream& os);
/// kind: farfield | field | residual. Writes CSV to output, or to os when output is empty.
void cmd_plotdata(const fs::path& input, const std::string& kind, const std::optional<fs::path>& output,
                  std::ostream& os);

/// Parses argv, runs the command and maps errors to exit codes.
int main(int argc, char** argv);

}  // namespace nlscat::cli
