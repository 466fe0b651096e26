#include "braindec/log.hpp"

#include <cstdlib>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace braindec::log {
namespace {

std::shared_ptr<spdlog::logger> logger() {
  static std::shared_ptr<spdlog::logger> instance = [] {
    auto lg = spdlog::stderr_color_mt("braindec");
    lg->set_pattern("[%l] %v");
    lg->set_level(spdlog::level::warn);
    return lg;
  }();
  return instance;
}

}  // namespace

void init_from_env() {
  const char* env = std::getenv("BRAINDEC_LOG");
  if (env == nullptr) return;
  logger()->set_level(spdlog::level::from_str(env));
}

void debug(std::string_view msg) { logger()->debug(msg); }
void info(std::string_view msg) { logger()->info(msg); }
void warn(std::string_view msg) { logger()->warn(msg); }
void error(std::string_view msg) { logger()->error(msg); }

}  // namespace braindec::log
