#include "parrep/log.hpp"

#include <iostream>
#include <mutex>
#include <utility>

namespace parrep::log {
namespace {

std::mutex& handler_mutex() {
  static std::mutex m;
  return m;
}

Handler& handler() {
  static Handler h;
  return h;
}

}  // namespace

void set_warning_handler(Handler h) {
  std::lock_guard lock(handler_mutex());
  handler() = std::move(h);
}

void warn(std::string_view message) {
  std::lock_guard lock(handler_mutex());
  if (handler()) {
    handler()(message);
    return;
  }
  std::cerr << "[parrep warning] " << message << '\n';
}

}  // namespace parrep::log
