#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "io.hpp"

namespace coarse::cli {

enum ExitCode : int { ok = 0, invariant_violation = 1, invalid_input = 2, obstruction = 3 };

struct RunConfig {
  std::string command;
  std::string spec_path;
  std::string out_path;   ///< empty: stdout
  std::string dump_path;  ///< CSV eigenvalue dump (ess only)
  std::optional<double> tol;
  std::optional<int> window;
  std::vector<double> radii;
  std::vector<std::string> proxies;
  std::uint64_t seed = 0;

  /// Throws InvalidInput on non-positive tolerances, negative radii or a
  /// window above max_window.
  void validate() const;
  static constexpr int max_window = 100000;
};

struct CommandResult {
  io::Json report;
  int status = ExitCode::ok;
};

CommandResult cmd_space(const io::Json& doc, const RunConfig& cfg);
CommandResult cmd_ghost(const io::Json& doc, const RunConfig& cfg);
CommandResult cmd_ess(const io::Json& doc, const RunConfig& cfg);
CommandResult cmd_truncate(const io::Json& doc, const RunConfig& cfg);

/// Parses argv-style arguments (without the program name), runs the command
/// and maps errors to exit codes.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace coarse::cli
