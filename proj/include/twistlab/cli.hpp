#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace twistlab::cli {

/// Runs the command line (without the program name). Returns 0 on success,
/// 2 on validation errors, 1 on internal errors.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace twistlab::cli
