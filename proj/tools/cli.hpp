#pragma once

#include <iosfwd>

namespace robust_trade::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalFailure = 3 };

/// Entry point of the robust-trade tool; writes reports to `out`, diagnostics
/// to `err` and returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace robust_trade::cli
