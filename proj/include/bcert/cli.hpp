#pragma once

#include <iosfwd>

namespace bcert {

// Exit codes: 0 success, 1 refutation or infeasible composition, 2 input error.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace bcert
