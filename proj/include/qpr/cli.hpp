#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qpr {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitDomain = 1;  // validation, domain or eligibility failure
inline constexpr int kExitIo = 2;      // unreadable/unwritable file or malformed input

// Runs one `qpr` invocation. args excludes the program name. Tabular output
// goes to `out` unless --out names a file; failures print a single JSON line
// {"error": kind, "message": ..., "exit": code} to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qpr
