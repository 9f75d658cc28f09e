#pragma once

#include <string>
#include <vector>

namespace tdss::cli {

// Exit codes: 0 success, 2 config error, 3 data error, 4 numeric failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitNumeric = 4;

// Entry point behind main(). args excludes the program name, e.g.
// {"train", "--config", "cfg.json", "--output", "out", "--override", "beta=0"}.
int run(const std::vector<std::string>& args);

}  // namespace tdss::cli
