#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace fleet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitAnomaly = 1;
inline constexpr int kExitConfig = 2;

enum class LogLevel { quiet, info, trace };

// Reads FLEET_LOG's value; unset means info.
std::optional<LogLevel> parse_log_level(const char* value);

// `fleet <run|report|validate> ...`; args excludes the program name.
// Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
            const char* fleet_log = nullptr);

}  // namespace fleet::cli
