#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ppo {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1; // well-formed input violating a domain rule
inline constexpr int kExitInput = 2;  // unreadable or malformed input, bad arguments

// Runs one `ppo` subcommand. args excludes the program name. Structured results go to `out`
// as JSON, diagnostics to `err`.
int run_cli(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

} // namespace ppo
