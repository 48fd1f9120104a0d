#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lifemodel {

/// Runs the command line `args` (without the program name). Data goes to `out`
/// (or the --out file), diagnostics to `err`. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lifemodel
