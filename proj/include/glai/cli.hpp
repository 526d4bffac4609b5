#pragma once

#include <string>
#include <vector>

namespace glai::cli {

// Exit codes: 0 success, 1 runtime failure, 2 usage/config error.
int run(const std::vector<std::string>& args);

}  // namespace glai::cli
