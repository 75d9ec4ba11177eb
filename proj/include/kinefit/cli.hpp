#pragma once

#include <string>
#include <vector>

namespace kinefit {

// Exit codes shared by every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitNonConvergence = 2;
inline constexpr int kExitIo = 3;

// Runs the command line given the arguments after the program name.
int run_cli(std::vector<std::string> args);

}  // namespace kinefit
