#pragma once

#include <string>
#include <vector>

namespace maxcgo {

// Exit codes: 0 success, 2 config error, 3 numeric failure, 4 I/O error.
int run_cli(int argc, const char* const* argv);
int run_cli(const std::vector<std::string>& args);  // args[0] is the program name

}  // namespace maxcgo
