#include "parrep/sched/wallclock.hpp"

#include <chrono>
#include <string>

#include "parrep/errors.hpp"

namespace parrep {

std::string_view to_string(WallClockMode m) noexcept {
  switch (m) {
    case WallClockMode::unit:
      return "unit";
    case WallClockMode::iid_random:
      return "iid_random";
    case WallClockMode::replica_heterogeneous:
      return "replica_heterogeneous";
    case WallClockMode::state_coupled_invalid:
      return "state_coupled_invalid";
    case WallClockMode::measured:
      return "measured";
  }
  return "unknown";
}

WallClockMode parse_wallclock_mode(std::string_view s) {
  for (auto m : {WallClockMode::unit, WallClockMode::iid_random,
                 WallClockMode::replica_heterogeneous, WallClockMode::state_coupled_invalid,
                 WallClockMode::measured}) {
    if (s == to_string(m)) return m;
  }
  throw ConfigError("unknown wall-clock mode '" + std::string(s) + "'");
}

void WallClockModel::validate() const {
  if (!(mean_cost > 0.0)) throw InvalidArgument("WallClockModel: mean cost must be positive");
  if (mode == WallClockMode::replica_heterogeneous) {
    if (speeds.empty()) throw InvalidArgument("WallClockModel: replica speeds are required");
    for (double s : speeds) {
      if (!(s > 0.0)) throw InvalidArgument("WallClockModel: replica speeds must be positive");
    }
  }
}

double WallClockModel::cost(int replica, std::uint64_t segment, const RngStream& stream) const {
  switch (mode) {
    case WallClockMode::unit:
    case WallClockMode::state_coupled_invalid:
    case WallClockMode::measured:
      return mean_cost;
    case WallClockMode::iid_random: {
      Rng rng = stream.derive(static_cast<std::uint64_t>(replica)).at(segment);
      return rng.exponential(1.0 / mean_cost);
    }
    case WallClockMode::replica_heterogeneous: {
      const double speed = speeds[static_cast<std::size_t>(replica - 1) % speeds.size()];
      Rng rng = stream.derive(static_cast<std::uint64_t>(replica)).at(segment);
      return rng.exponential(speed / mean_cost);
    }
  }
  return mean_cost;
}

CompletionTable simulate_wallclock(const WallClockModel& model, int replicas,
                                   std::uint64_t horizon, const RngStream& stream,
                                   const std::vector<double>& state_costs) {
  model.validate();
  if (replicas < 1) throw InvalidArgument("simulate_wallclock: need at least one replica");
  if (horizon < 1) throw InvalidArgument("simulate_wallclock: horizon must be at least 1");
  if (!state_costs.empty() && state_costs.size() != static_cast<std::size_t>(replicas)) {
    throw InvalidArgument("simulate_wallclock: one state cost per replica is required");
  }
  if (model.reads_state() && state_costs.empty()) {
    throw InvalidArgument("simulate_wallclock: the state-coupled mode needs replica state costs");
  }
  CompletionTable t(static_cast<std::size_t>(replicas));
  for (int r = 1; r <= replicas; ++r) {
    auto& row = t[static_cast<std::size_t>(r - 1)];
    row.reserve(horizon + 1);
    double clock = 0.0;
    for (std::uint64_t m = 0; m <= horizon; ++m) {
      const double c = (m == 0 && !state_costs.empty())
                           ? state_costs[static_cast<std::size_t>(r - 1)]
                           : model.cost(r, m, stream);
      clock += c;
      row.push_back(clock);
    }
  }
  return t;
}

MeasuredClock::MeasuredClock()
    : origin_ns_(std::chrono::duration_cast<std::chrono::nanoseconds>(
                     std::chrono::steady_clock::now().time_since_epoch())
                     .count()) {}

double MeasuredClock::now() const {
  const auto ns = std::chrono::duration_cast<std::chrono::nanoseconds>(
                      std::chrono::steady_clock::now().time_since_epoch())
                      .count();
  return static_cast<double>(ns - origin_ns_) * 1e-9;
}

}  // namespace parrep
