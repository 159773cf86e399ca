#pragma once

// Batch experiment runner. The entry point is a plain function so that tests
// can drive it in-process and compare output bytes.

#include <iosfwd>

#include "qcomp/error.hpp"
#include "qcomp/serialize.hpp"

namespace qcomp::cli {

enum ExitCode : int {
  kOk = 0,
  kInvalidInput = 2,
  kValidationFailure = 3,
  kInfeasibleScale = 4,
  kConvergenceFailure = 5,
};

int exit_code(ErrorKind kind);

/// Every floating-point leaf rounded to `digits` significant digits.
Json round_json(const Json& j, int digits);

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace qcomp::cli
