#include "lorentz/log.hpp"

#include <atomic>
#include <cstdlib>
#include <iostream>
#include <mutex>
#include <string>

namespace lorentz::log {

namespace {

Level initial_level() {
  if (const char* env = std::getenv("LORENTZ_LOG")) {
    const std::string v(env);
    if (v == "quiet") return Level::quiet;
    if (v == "info") return Level::info;
  }
  return Level::warning;
}

std::atomic<Level> g_level{initial_level()};
std::mutex g_mutex;

void emit(const char* tag, std::string_view message) {
  std::lock_guard lock(g_mutex);
  std::clog << tag << message << '\n';
}

}  // namespace

void set_level(Level level) { g_level = level; }
Level level() { return g_level; }

void warn(std::string_view message) {
  if (g_level >= Level::warning) emit("[lorentz] warning: ", message);
}

void info(std::string_view message) {
  if (g_level >= Level::info) emit("[lorentz] ", message);
}

}  // namespace lorentz::log
