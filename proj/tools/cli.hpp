#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace lvq::cli {

// Exit codes: 0 success, 2 usage error, 3 validation error, 4 runtime failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitValidation = 3;
inline constexpr int kExitRuntime = 4;

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lvq::cli
