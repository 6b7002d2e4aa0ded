#ifndef PESTPULSE_CLI_HPP
#define PESTPULSE_CLI_HPP

#include <string>
#include <vector>

namespace pestpulse::cli {

inline constexpr const char* kArtifactVersion = "0.1.0";

// Runs one subcommand. args excludes the program name. Exit codes:
// 0 success, 1 usage/validation error, 2 data error.
int run(const std::vector<std::string>& args);

}  // namespace pestpulse::cli

#endif  // PESTPULSE_CLI_HPP
