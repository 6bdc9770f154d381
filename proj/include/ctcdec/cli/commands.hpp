// SPDX-License-Identifier: Apache-2.0

#pragma once

#include <iosfwd>

namespace ctcdec::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // decode or evaluation failure
inline constexpr int kExitUsage = 2;    // I/O or usage error

/// Parses arguments and runs one subcommand. Results that have no output path
/// go to `out`; diagnostics go to `err`.
int Run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ctcdec::cli
