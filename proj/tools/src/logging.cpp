#include "logging.hpp"

#include <cstdlib>
#include <string>

#include <spdlog/sinks/stdout_color_sinks.h>
#include <spdlog/spdlog.h>

namespace mixedergo::cli {

void init_logging() {
  auto logger = spdlog::stderr_color_mt("mixedergo");
  logger->set_pattern("mixedergo: %l: %v");
  spdlog::set_default_logger(logger);

  const char* env = std::getenv("MIXEDERGO_LOG");
  const std::string level = env ? env : "warn";
  if (level == "error") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "warn") {
    spdlog::set_level(spdlog::level::warn);
  } else if (level == "info") {
    spdlog::set_level(spdlog::level::info);
  } else if (level == "debug") {
    spdlog::set_level(spdlog::level::debug);
  } else {
    spdlog::set_level(spdlog::level::warn);
    spdlog::warn("ignoring MIXEDERGO_LOG={} (expected error, warn, info or debug)", level);
  }
}

}  // namespace mixedergo::cli
