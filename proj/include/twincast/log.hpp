#pragma once

#include <cstdio>
#include <cstdlib>
#include <cstring>

namespace twincast {

enum class LogLevel { Error = 0, Info = 1, Debug = 2 };

// TWINCAST_LOG in {error, info, debug}; default error.
inline LogLevel log_level() {
  static const LogLevel level = [] {
    const char* env = std::getenv("TWINCAST_LOG");
    if (env == nullptr) return LogLevel::Error;
    if (std::strcmp(env, "debug") == 0) return LogLevel::Debug;
    if (std::strcmp(env, "info") == 0) return LogLevel::Info;
    return LogLevel::Error;
  }();
  return level;
}

template <typename... Args>
void log_at(LogLevel level, const char* fmt, Args... args) {
  if (static_cast<int>(level) > static_cast<int>(log_level())) return;
  const char* tag = level == LogLevel::Error  ? "error"
                    : level == LogLevel::Info ? "info"
                                              : "debug";
  std::fprintf(stderr, "[%s] ", tag);
  std::fprintf(stderr, fmt, args...);
  std::fprintf(stderr, "\n");
}

}  // namespace twincast
