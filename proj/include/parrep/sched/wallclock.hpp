#pragma once

#include <cstdint>
#include <functional>
#include <string_view>
#include <vector>

#include "parrep/process/rng.hpp"

namespace parrep {

/// Virtual cost model for producing consecutive segments of each replica.
enum class WallClockMode {
  unit,                   // every segment costs 1
  iid_random,             // Exp(mean) per segment
  replica_heterogeneous,  // Exp(mean / speed_r) per segment
  state_coupled_invalid,  // segment 0 cost read from the replica's state
  measured,               // host time; nondeterministic
};

std::string_view to_string(WallClockMode m) noexcept;
WallClockMode parse_wallclock_mode(std::string_view s);

struct WallClockModel {
  WallClockMode mode = WallClockMode::unit;
  double mean_cost = 1.0;
  std::vector<double> speeds{};  // replica r uses speeds[(r-1) % size]

  /// Cost of segment m of replica r (1-based) in the state-free modes. The
  /// state-coupled mode uses this for m >= 1 and caller-supplied costs for m = 0.
  double cost(int replica, std::uint64_t segment, const RngStream& stream) const;

  bool reads_state() const noexcept { return mode == WallClockMode::state_coupled_invalid; }
  bool deterministic() const noexcept { return mode != WallClockMode::measured; }
  void validate() const;
};

/// t_wall^r(m) for r = 1..R (outer index r-1), m = 0..M.
using CompletionTable = std::vector<std::vector<double>>;

/// Cumulative completion times over segments 0..M. `state_costs`, when
/// non-empty, overrides the segment-0 cost of each replica.
CompletionTable simulate_wallclock(const WallClockModel& model, int replicas,
                                   std::uint64_t horizon, const RngStream& stream,
                                   const std::vector<double>& state_costs = {});

/// Host-time cost sampler for the measured mode.
class MeasuredClock {
 public:
  MeasuredClock();
  /// Seconds since construction.
  double now() const;

 private:
  std::int64_t origin_ns_;
};

}  // namespace parrep
