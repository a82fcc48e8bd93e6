#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace geoexp {

/// Runs the command line front-end on argv-style arguments (without the program
/// name). Returns the process exit code: 0 success, 2 I/O failure, 3 numerical
/// failure, 4 invalid configuration.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace geoexp
