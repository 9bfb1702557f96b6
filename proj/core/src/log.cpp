#include "levinforge/log.hpp"

#include <cstdio>
#include <cstdlib>
#include <cstring>
#include <mutex>

namespace levinforge {

namespace {

LogLevel parse_level(const char* text) {
  if (text == nullptr) return LogLevel::Warn;
  if (std::strcmp(text, "error") == 0) return LogLevel::Error;
  if (std::strcmp(text, "warn") == 0) return LogLevel::Warn;
  if (std::strcmp(text, "info") == 0) return LogLevel::Info;
  if (std::strcmp(text, "debug") == 0) return LogLevel::Debug;
  return LogLevel::Warn;
}

}  // namespace

LogLevel log_level() {
  static const LogLevel level = parse_level(std::getenv("LEVIN_FORGE_LOG"));
  return level;
}

bool log_enabled(LogLevel level) {
  return static_cast<int>(level) <= static_cast<int>(log_level());
}

void log_msg(LogLevel level, const std::string& message) {
  if (!log_enabled(level)) return;
  static const char* const names[] = {"error", "warn", "info", "debug"};
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  std::fprintf(stderr, "[%s] %s\n", names[static_cast<int>(level)],
               message.c_str());
}

}  // namespace levinforge
