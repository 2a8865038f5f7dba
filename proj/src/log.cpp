#include "peplica/log.hpp"

#include <cstdio>
#include <stdexcept>

namespace peplica::log {

namespace {
Level g_level = Level::info;

void emit(Level lv, const char* tag, const std::string& msg) {
  if (lv <= g_level) std::fprintf(stderr, "[%s] %s\n", tag, msg.c_str());
}
}  // namespace

void set_level(Level level) { g_level = level; }

void set_level(const std::string& name) {
  if (name == "error") {
    g_level = Level::error;
  } else if (name == "warn") {
    g_level = Level::warn;
  } else if (name == "info") {
    g_level = Level::info;
  } else if (name == "debug") {
    g_level = Level::debug;
  } else {
    throw std::invalid_argument("unknown log level '" + name + "'");
  }
}

Level level() { return g_level; }

void error(const std::string& msg) { emit(Level::error, "error", msg); }
void warn(const std::string& msg) { emit(Level::warn, "warn", msg); }
void info(const std::string& msg) { emit(Level::info, "info", msg); }
void debug(const std::string& msg) { emit(Level::debug, "debug", msg); }

}  // namespace peplica::log
