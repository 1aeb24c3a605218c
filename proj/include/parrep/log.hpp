#pragma once

#include <functional>
#include <string_view>

namespace parrep::log {

using Handler = std::function<void(std::string_view)>;

// Replaces the warning sink. An empty handler restores the default (stderr).
void set_warning_handler(Handler handler);

void warn(std::string_view message);

}  // namespace parrep::log
