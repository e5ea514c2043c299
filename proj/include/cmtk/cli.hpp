#pragma once

#include <string>
#include <vector>

namespace cmtk::cli {

// Parses and runs one invocation. Returns the process exit code:
// 0 success, 1 runtime failure, 2 usage/config error.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace cmtk::cli
