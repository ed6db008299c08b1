#include "falcon/log.hpp"

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

#include <cstdlib>
#include <memory>

namespace falcon {

namespace {

spdlog::logger& logger() {
  static std::shared_ptr<spdlog::logger> lg = [] {
    auto l = spdlog::stderr_color_mt("falcon");
    l->set_pattern("[%l] %v");
    const char* env = std::getenv("FALCON_LOG");
    l->set_level(env ? spdlog::level::from_str(env) : spdlog::level::warn);
    return l;
  }();
  return *lg;
}

}  // namespace

void log_debug(const std::string& msg) { logger().debug(msg); }
void log_info(const std::string& msg) { logger().info(msg); }
void log_warn(const std::string& msg) { logger().warn(msg); }
void log_error(const std::string& msg) { logger().error(msg); }

}  // namespace falcon
