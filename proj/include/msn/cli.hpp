#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace msn
{

/// Exit codes: 0 success (order verdicts included), 1 selftest failure,
/// 2 configuration or input error, 3 numeric failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitSelftestFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitNumeric = 3;

/// Entry point behind the `msn` executable; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace msn
