#pragma once

#include <iosfwd>

namespace sepform::cli {

/// Exit codes: 0 success, 1 malformed input, 2 tolerance or verification
/// failure, 3 solver non-convergence.
enum ExitCode : int { kOk = 0, kInput = 1, kTolerance = 2, kConvergence = 3 };

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace sepform::cli
