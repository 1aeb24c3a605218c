#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

namespace parrep {

/// One decorrelation + parallel step iteration of a stationary-average driver.
struct TraceRecord {
  std::uint64_t iteration = 0;
  int region = 0;
  double f_decorr = 0.0;
  double T_decorr = 0.0;
  std::uint64_t decorr_steps = 0;
  double f_par = 0.0;
  double T_par = 0.0;
  std::uint64_t L = 0;
  std::uint64_t fragment_steps = 0;
  double dephase_units = 0.0;
  double parallel_units = 0.0;
  bool parallel_step = false;  // false when T_stop was reached after decorrelation
};

/// Keeps the first `cap` records in memory; later ones are appended to a
/// line-delimited JSON file when a spill path is set, and only counted
/// otherwise.
class Trace {
 public:
  explicit Trace(std::size_t cap = 1 << 16, std::string spill_path = {});

  void push(const TraceRecord& r);
  const std::vector<TraceRecord>& records() const noexcept { return records_; }
  std::uint64_t total() const noexcept { return total_; }
  std::uint64_t spilled() const noexcept { return spilled_; }
  bool complete() const noexcept { return total_ == records_.size(); }

 private:
  std::size_t cap_;
  std::string spill_path_;
  std::vector<TraceRecord> records_;
  std::uint64_t total_ = 0;
  std::uint64_t spilled_ = 0;
};

std::string to_json_line(const TraceRecord& r);

}  // namespace parrep
