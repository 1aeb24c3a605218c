#include <string>

#include "parrep/algorithms/parrep.hpp"

namespace parrep {

std::string_view to_string(Ordering o) noexcept {
  return o == Ordering::synchronous ? "synchronous" : "wallclock";
}

Ordering parse_ordering(std::string_view s) {
  if (s == "synchronous" || s == "sync") return Ordering::synchronous;
  if (s == "wallclock" || s == "async") return Ordering::wallclock;
  throw ConfigError("unknown ordering '" + std::string(s) + "'");
}

void ParRepConfig::validate() const {
  if (replicas < 1) throw InvalidArgument("ParRepConfig: replicas must be at least 1");
  if (!(window > 0.0)) throw InvalidArgument("ParRepConfig: fragment duration must be positive");
  if (!(t_stop > 0.0)) throw InvalidArgument("ParRepConfig: T_stop must be positive");
  if (!(t_corr >= 0.0)) throw InvalidArgument("ParRepConfig: t_corr must be nonnegative");
  for (const auto& [label, t] : t_corr_by_region) {
    if (!(t >= 0.0)) {
      throw InvalidArgument("ParRepConfig: t_corr for region " + std::to_string(label) +
                            " must be nonnegative");
    }
  }
  if (ordering == Ordering::wallclock) wallclock.validate();
}

namespace {

int box_label(const pdmp::BoxRegion& w) { return w.label; }

}  // namespace

StationaryRun skeleton_stationary_average(const pdmp::SkeletonProcess& process,
                                          std::span<const pdmp::BoxRegion> regions,
                                          ParRepConfig cfg, const pdmp::FlowObservable& f,
                                          const pdmp::SkeletonPoint& x0, RngStream stream) {
  cfg.window = 1.0;
  const auto& model = process.model();
  const RngStream s_seed = stream.derive(Purpose::restart);
  std::vector<std::vector<pdmp::SkeletonPoint>> seeds;
  for (std::size_t i = 0; i < regions.size(); ++i) {
    std::vector<pdmp::SkeletonPoint> set;
    std::uint64_t n = 0;
    for (const auto& xi : pdmp::anchor_states(model, regions[i].box)) {
      Rng rng = s_seed.derive(i).at(n++);
      set.push_back(pdmp::skeleton_start(model, xi, rng));
    }
    seeds.push_back(std::move(set));
  }
  return stationary_average(process, regions,
                            std::span<const std::vector<pdmp::SkeletonPoint>>(seeds), cfg,
                            process.integral(f), box_label, x0, stream);
}

StationaryRun pdmp_stationary_average(const pdmp::DiscretizedChain& process,
                                      std::span<const pdmp::BoxRegion> regions,
                                      const ParRepConfig& cfg, const pdmp::FlowObservable& f,
                                      const pdmp::LiftedState& z0, RngStream stream) {
  std::vector<std::vector<pdmp::LiftedState>> seeds;
  for (const auto& w : regions) seeds.push_back(pdmp::anchor_states(process.model(), w.box));
  return stationary_average(process, regions,
                            std::span<const std::vector<pdmp::LiftedState>>(seeds), cfg, f,
                            box_label, z0, stream);
}

std::uint64_t recount_serial_steps(const Trace& trace) {
  if (!trace.complete()) throw Error("recount_serial_steps: trace is incomplete");
  std::uint64_t n = 0;
  for (const auto& r : trace.records()) n += r.decorr_steps + r.fragment_steps;
  return n;
}

}  // namespace parrep
