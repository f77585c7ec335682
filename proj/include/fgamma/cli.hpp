#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace fgamma {

/// Runs the `fgamma` command line. `args` excludes the program name.
/// Returns 0 on success, 1 on user error and 2 on an internal invariant
/// violation or a failed verify suite.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace fgamma
