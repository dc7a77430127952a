#pragma once

#include <string>

namespace reprrec::log {

enum class Level { Error = 0, Info = 1, Debug = 2 };

// Current verbosity. Initialized from the REPRREC_LOG environment variable
// (error|info|debug, default info) on first use.
Level level();
void set_level(Level lvl);

void error(const std::string& msg);
void info(const std::string& msg);
void debug(const std::string& msg);

}  // namespace reprrec::log
