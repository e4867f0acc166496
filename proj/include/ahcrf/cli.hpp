#pragma once

#include <iosfwd>

namespace ahcrf {

/// Entry point of the `ahcrf` tool. Returns the process exit code: 0 on
/// success, 2 for usage errors, 1 for any other failure.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ahcrf
