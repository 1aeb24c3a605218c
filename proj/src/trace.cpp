#include "parrep/algorithms/trace.hpp"

#include <fstream>
#include <nlohmann/json.hpp>

#include "parrep/errors.hpp"

namespace parrep {

Trace::Trace(std::size_t cap, std::string spill_path)
    : cap_(cap), spill_path_(std::move(spill_path)) {}

void Trace::push(const TraceRecord& r) {
  ++total_;
  if (records_.size() < cap_) {
    records_.push_back(r);
    return;
  }
  if (spill_path_.empty()) return;
  std::ofstream out(spill_path_, std::ios::app);
  if (!out) throw Error("cannot append trace records to '" + spill_path_ + "'");
  out << to_json_line(r) << '\n';
  ++spilled_;
}

std::string to_json_line(const TraceRecord& r) {
  const nlohmann::json j = {{"iteration", r.iteration},
                            {"region", r.region},
                            {"f_decorr", r.f_decorr},
                            {"T_decorr", r.T_decorr},
                            {"decorr_steps", r.decorr_steps},
                            {"f_par", r.f_par},
                            {"T_par", r.T_par},
                            {"L", r.L},
                            {"fragment_steps", r.fragment_steps},
                            {"dephase_units", r.dephase_units},
                            {"parallel_units", r.parallel_units},
                            {"parallel_step", r.parallel_step}};
  return j.dump();
}

}  // namespace parrep
