#pragma once

#include <string>
#include <vector>

namespace wii {

// Command-line entry point; argv-style arguments without the program name.
// Returns the process exit code (0 success, 64 usage, 65 invalid
// config/data, 66 I/O failure, 70 internal error).
int run_cli(const std::vector<std::string>& args);

}  // namespace wii
