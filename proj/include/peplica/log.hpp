#pragma once

#include <string>

namespace peplica::log {

enum class Level { error = 0, warn = 1, info = 2, debug = 3 };

void set_level(Level level);
void set_level(const std::string& name);  // "error" | "warn" | "info" | "debug"
Level level();

void error(const std::string& msg);
void warn(const std::string& msg);
void info(const std::string& msg);
void debug(const std::string& msg);

}  // namespace peplica::log
