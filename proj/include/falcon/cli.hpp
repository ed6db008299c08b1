#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace falcon {

inline constexpr int kExitParse = 2;
inline constexpr int kExitConfig = 3;
inline constexpr int kExitNumeric = 4;

/// Runs one `falcon` command. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace falcon
