#pragma once

#include <string_view>

namespace braindec::log {

// Verbosity is read once from BRAINDEC_LOG (trace, debug, info, warn, error, off).
void init_from_env();

void debug(std::string_view msg);
void info(std::string_view msg);
void warn(std::string_view msg);
void error(std::string_view msg);

}  // namespace braindec::log
