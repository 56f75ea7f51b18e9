#pragma once

#include <iosfwd>

namespace springstring::cli {

// Exit statuses
inline constexpr int kOk = 0;
inline constexpr int kRuntimeError = 1;
inline constexpr int kValidationError = 2;

/// Parses argv and runs one subcommand. Key=value summaries and CSV written to
/// standard output go to `out`; diagnostics go to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace springstring::cli
