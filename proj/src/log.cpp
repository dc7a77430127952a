#include "reprrec/log.hpp"

#include <cstdlib>
#include <iostream>
#include <mutex>

namespace reprrec::log {

namespace {

Level g_level = Level::Info;
std::once_flag g_init;
std::mutex g_mutex;

void init_from_env() {
  const char* env = std::getenv("REPRREC_LOG");
  if (!env) return;
  std::string v(env);
  if (v == "error") {
    g_level = Level::Error;
  } else if (v == "info") {
    g_level = Level::Info;
  } else if (v == "debug") {
    g_level = Level::Debug;
  }
}

void emit(const char* tag, const std::string& msg) {
  std::lock_guard<std::mutex> lock(g_mutex);
  std::cerr << tag << msg << '\n';
}

}  // namespace

Level level() {
  std::call_once(g_init, init_from_env);
  return g_level;
}

void set_level(Level lvl) {
  std::call_once(g_init, init_from_env);
  g_level = lvl;
}

void error(const std::string& msg) {
  if (level() >= Level::Error) emit("[error] ", msg);
}

void info(const std::string& msg) {
  if (level() >= Level::Info) emit("[info] ", msg);
}

void debug(const std::string& msg) {
  if (level() >= Level::Debug) emit("[debug] ", msg);
}

}  // namespace reprrec::log
