#pragma once

#include <string>
#include <vector>

namespace chp::cli {

// Exit codes: 0 success, 1 non-convergence, 2 input error.
int run(int argc, const char* const* argv);
int run(const std::vector<std::string>& args);  // args without argv[0]

}  // namespace chp::cli
