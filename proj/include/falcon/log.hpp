#pragma once

#include <string>

namespace falcon {

/// Verbosity comes from FALCON_LOG (trace|debug|info|warn|error|off); default warn.
void log_debug(const std::string& msg);
void log_info(const std::string& msg);
void log_warn(const std::string& msg);
void log_error(const std::string& msg);

}  // namespace falcon
