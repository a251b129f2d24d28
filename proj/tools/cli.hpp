#pragma once

#include <iosfwd>

namespace cpair {

/// Runs one command-line invocation. Exit codes: 0 success, 1 invalid input
/// or usage, 2 numerical failure or a verification that did not pass.
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace cpair
