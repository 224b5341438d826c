#include "logitbench/log.hpp"

#include <atomic>
#include <iostream>
#include <mutex>

namespace logitbench {
namespace {

std::atomic<LogLevel> g_level{LogLevel::warn};
std::mutex g_mutex;

const char* tag(LogLevel level) {
  switch (level) {
    case LogLevel::debug: return "debug";
    case LogLevel::info: return "info";
    case LogLevel::warn: return "warn";
    case LogLevel::error: return "error";
    case LogLevel::off: break;
  }
  return "";
}

}  // namespace

void set_log_level(LogLevel level) { g_level = level; }
LogLevel log_level() { return g_level; }

void log_message(LogLevel level, std::string_view message) {
  if (level < g_level.load()) return;
  std::lock_guard lock(g_mutex);
  std::clog << "[" << tag(level) << "] " << message << '\n';
}

}  // namespace logitbench
