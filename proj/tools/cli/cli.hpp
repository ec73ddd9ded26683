#pragma once

// The iplc command line, callable in-process so tests can drive it.

#include <iosfwd>
#include <string>
#include <vector>

#include "iplc/error.hpp"

namespace iplc::cli {

enum ExitCode : int { Ok = 0, Io = 1, Usage = 2, Eval = 3, Distributed = 4 };

/// Exit code for a failure with this error code.
int exitCodeFor(ErrorCode code) noexcept;

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

/// Interactive session: declarations accumulate, expressions are evaluated
/// at the session context. Returns at `:quit` or end of input.
int repl(std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace iplc::cli
