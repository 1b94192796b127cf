#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace cirb::cli {

inline constexpr const char *kVersion = "1.0.0";

/// Parses argv and dispatches to a subcommand. Returns the process exit code:
/// 0 success, 2 validation, 3 data schema, 4 numeric, 5 I/O.
int run(int argc, const char *const *argv);

/// Same, with explicit streams for output sent to "-" and for diagnostics.
int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err);

/// Text for `--explain <table>`; empty if the table is unknown.
std::string explain(const std::string &table);

} // namespace cirb::cli
