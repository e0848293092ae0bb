#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ksphere::cli {

inline constexpr const char* tool_version = "1.0.0";

/// Exit codes: 0 ok, 1 unexpected failure, 2 invalid input, 3 work bound exceeded, 4 I/O failure.
enum Exit : int { ok = 0, internal = 1, invalid = 2, too_much_work = 3, io_failure = 4 };

/// Runs one command line (without the program name). Payloads go to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Command names in help order.
std::vector<std::string> command_names();

/// Overview listing every command with a one-line description.
std::string help_text();

/// Closest command name by edit distance, or empty when nothing is close.
std::string suggest(const std::string& name);

/// Flat key=value config: '#' starts a comment, blank lines are skipped.
std::vector<std::pair<std::string, std::string>> read_config(const std::string& path);

}  // namespace ksphere::cli
