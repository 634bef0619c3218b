#pragma once

#include <string>
#include <vector>

namespace avprosody {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitInputError = 1;
inline constexpr int kExitNumericalError = 2;

/// Entry point of the `avprosody` command; returns the process exit code.
int run_cli(const std::vector<std::string>& args);

}  // namespace avprosody
