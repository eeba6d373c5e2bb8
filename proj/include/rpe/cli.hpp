#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rpe {

// Full command-line entry point (argv without the program name). Exit codes:
// 0 success, 2 validation error, 3 numerical failure, 4 size-guard violation.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace rpe
