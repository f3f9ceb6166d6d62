#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace trag::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitSmokeFailed = 3;

/// Runs one `trag` invocation. `args` excludes the program name. Data goes to
/// `out`, logs and usage text to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace trag::cli
