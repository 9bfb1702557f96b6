#pragma once

#include <string>

namespace levinforge {

enum class LogLevel { Error = 0, Warn = 1, Info = 2, Debug = 3 };

// Active level, read once per process from LEVIN_FORGE_LOG
// (error|warn|info|debug). Unset or unrecognized means warn.
LogLevel log_level();

bool log_enabled(LogLevel level);

// Writes "[level] message" to stderr when the level is enabled.
void log_msg(LogLevel level, const std::string& message);

}  // namespace levinforge
