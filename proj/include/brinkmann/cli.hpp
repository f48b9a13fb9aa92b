#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace brinkmann::cli {

/// Runs one command line (without the program name). Exit status: 0 on
/// success, 1 on library errors, 2 on argument errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace brinkmann::cli
