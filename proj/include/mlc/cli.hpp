#pragma once

#include <iosfwd>

namespace mlc::cli {

// Exit codes.
inline constexpr int kOk = 0;
inline constexpr int kUsage = 2;
inline constexpr int kFormat = 3;
inline constexpr int kNumeric = 4;
inline constexpr int kInternal = 1;

// Entry point of the `mlc` tool; results go to files or `out`, diagnostics
// (one JSON object per error) to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mlc::cli
