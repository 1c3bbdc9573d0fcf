#pragma once

#include <string>
#include <vector>

namespace dualest::cli {

/// Entry point shared by the binary and the tests. Returns the process exit
/// code: 0 on success, 1 on configuration errors, 2 when every trial of every
/// variant failed numerically.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // args without the program name

}  // namespace dualest::cli
