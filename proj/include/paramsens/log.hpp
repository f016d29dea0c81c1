#pragma once

#include <string_view>

namespace paramsens {

void log_info(std::string_view message);
void log_warning(std::string_view message);
/// Silences info messages (warnings are always printed).
void set_quiet(bool quiet);

}  // namespace paramsens
