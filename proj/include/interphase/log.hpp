#pragma once

#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>
#include <string_view>

namespace interphase::log {

enum class Level { quiet = 0, warn = 1, info = 2, debug = 3 };

// INTERPHASE_LOG=quiet|warn|info|debug, default warn.
inline Level level() {
  static const Level lvl = [] {
    const char* env = std::getenv("INTERPHASE_LOG");
    if (env == nullptr) return Level::warn;
    std::string_view v(env);
    if (v == "quiet" || v == "0") return Level::quiet;
    if (v == "info" || v == "2") return Level::info;
    if (v == "debug" || v == "3") return Level::debug;
    return Level::warn;
  }();
  return lvl;
}

inline void emit(Level at, std::string_view tag, const std::string& msg) {
  if (static_cast<int>(level()) < static_cast<int>(at)) return;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  std::cerr << "[interphase " << tag << "] " << msg << '\n';
}

inline void warn(const std::string& msg) { emit(Level::warn, "warn", msg); }
inline void info(const std::string& msg) { emit(Level::info, "info", msg); }
inline void debug(const std::string& msg) { emit(Level::debug, "debug", msg); }

}  // namespace interphase::log
