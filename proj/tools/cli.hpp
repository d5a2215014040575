#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace grafcet::cli {

/// Runs the `grafcet` command line. `args` excludes the program name.
/// Returns 0 on success, 1 on a failed check, 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace grafcet::cli
