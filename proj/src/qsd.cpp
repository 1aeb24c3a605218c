#include <string>

#include "parrep/qsd/dephasing.hpp"

namespace parrep {

std::string_view to_string(DephasingMethod m) noexcept {
  return m == DephasingMethod::rejection ? "rejection" : "fleming_viot";
}

DephasingMethod parse_dephasing_method(std::string_view s) {
  if (s == "rejection") return DephasingMethod::rejection;
  if (s == "fleming_viot") return DephasingMethod::fleming_viot;
  throw ConfigError("unknown dephasing method '" + std::string(s) + "'");
}

}  // namespace parrep
