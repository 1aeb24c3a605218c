#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "parrep/algorithms/trace.hpp"
#include "parrep/errors.hpp"
#include "parrep/pdmp/lifted_pdmp.hpp"
#include "parrep/qsd/decorrelation.hpp"
#include "parrep/qsd/dephasing.hpp"
#include "parrep/sched/ordering_plan.hpp"
#include "parrep/sched/parallel_step.hpp"

namespace parrep {

enum class Ordering { synchronous, wallclock };

std::string_view to_string(Ordering o) noexcept;
Ordering parse_ordering(std::string_view s);

struct ParRepConfig {
  int replicas = 1;
  double t_corr = 1.0;                       // default decorrelation/dephasing time
  std::map<int, double> t_corr_by_region{};  // overrides keyed by region label
  double window = 1.0;                       // fragment duration; one step for chains
  double t_stop = 1.0;
  Ordering ordering = Ordering::synchronous;
  WallClockModel wallclock{};
  DephasingMethod dephasing = DephasingMethod::fleming_viot;
  double rejection_tail = 0.0;
  std::uint64_t max_restarts = 1'000'000;
  std::uint64_t seed = 0;
  std::size_t trace_cap = 1 << 16;
  std::string trace_spill{};

  double t_corr_for(int label) const {
    const auto it = t_corr_by_region.find(label);
    return it == t_corr_by_region.end() ? t_corr : it->second;
  }
  void validate() const;
};

template <class S>
struct ParallelStepOutput {
  double f_par = 0.0;
  double T_par = 0.0;
  S exit{};
  std::uint64_t L = 0;
  Slot last{};
  std::uint64_t serial_steps = 0;  // native steps spliced into the trajectory
  double parallel_units = 0.0;     // idealized wall-clock of the splicing phase
  double dephase_units = 0.0;
  std::uint64_t ties = 0;
};

/// Optional segment-0 cost read from a replica's start state; only the
/// state-coupled wall-clock model uses it.
template <class S>
using StateCost = std::function<double(const S&)>;

/// Splices the R replica paths started at `starts` (QSD samples in w) in
/// the configured order and stops at the first escaping fragment.
///
/// Idealized cost: the synchronous phase is charged one unit per native step
/// of lockstep progress, the asynchronous phase its virtual wall-clock span
/// scaled to native steps per window.
template <PathProcess P, class G>
ParallelStepOutput<typename P::State> parrep_parallel_step(
    const P& process, const typename P::Region& w, std::span<const typename P::State> starts,
    const ParRepConfig& cfg, const G& g, RngStream stream,
    const StateCost<typename P::State>& state_cost = {}) {
  using State = typename P::State;
  const int R = static_cast<int>(starts.size());
  if (R < 1) throw InvalidArgument("parallel step: no replicas");
  OrderingPlan plan = [&] {
    if (cfg.ordering == Ordering::synchronous) return OrderingPlan::synchronous(R);
    std::vector<double> costs;
    if (cfg.wallclock.reads_state()) {
      if (!state_cost) throw InvalidArgument("parallel step: state-coupled costs need a state cost");
      for (const State& s : starts) costs.push_back(state_cost(s));
    }
    return OrderingPlan::wallclock(cfg.wallclock, R, stream.derive(Purpose::wallclock),
                                   std::move(costs));
  }();
  ReplicaFragmentSource<P, std::reference_wrapper<const G>> source(
      process, w, starts, cfg.window, std::cref(g), stream.derive(Purpose::parallel));
  const auto res = general_parallel_step(source, plan);

  ParallelStepOutput<State> out;
  out.f_par = res.g_par;
  out.T_par = res.T_par;
  out.exit = res.X_par;
  out.L = res.L;
  out.last = res.last;
  out.serial_steps = res.native_steps;
  out.ties = plan.ties();
  const auto per_window = static_cast<double>(
      std::max<long long>(1, std::llround(cfg.window / process.native_step())));
  if (cfg.ordering == Ordering::synchronous) {
    const double full_rows = static_cast<double>(res.last.segment);
    out.parallel_units = full_rows * per_window +
                         (res.last.replica > 1 ? per_window
                                               : static_cast<double>(res.last_fragment_steps));
  } else {
    double first = plan.completion(1, 0);
    for (int r = 2; r <= R; ++r) first = std::min(first, plan.completion(r, 0));
    const double end = plan.completion(res.last.replica, res.last.segment + 1);
    out.parallel_units = (end - first) * per_window;
  }
  return out;
}

/// R QSD samples in w restarted from `seeds`. A single replica skips
/// dephasing and continues from `current`, the certified decorrelation
/// endpoint, so that R = 1 reproduces plain serial simulation.
template <PathProcess P>
QsdSampleSet<typename P::State> dephase_for_step(const P& process, const typename P::Region& w,
                                                 std::span<const typename P::State> seeds,
                                                 const typename P::State& current,
                                                 const ParRepConfig& cfg, double t_corr,
                                                 RngStream stream) {
  if (cfg.replicas == 1) {
    QsdSampleSet<typename P::State> one;
    one.samples = {current};
    one.restarts = {0};
    return one;
  }
  DephasingConfig d;
  d.method = cfg.dephasing;
  d.t_corr = t_corr;
  d.replicas = cfg.replicas;
  d.max_restarts = cfg.max_restarts;
  d.rejection_tail = cfg.rejection_tail;
  return dephase(process, w, seeds, d, stream);
}

// Named parallel steps. Each takes QSD samples already drawn in W.

inline ParallelStepOutput<pdmp::SkeletonPoint> skeleton_sync_parallel_step(
    const pdmp::SkeletonProcess& process, const pdmp::BoxRegion& w,
    std::span<const pdmp::SkeletonPoint> starts, ParRepConfig cfg, const pdmp::FlowObservable& f,
    RngStream stream) {
  cfg.window = 1.0;
  cfg.ordering = Ordering::synchronous;
  return parrep_parallel_step(process, w, starts, cfg, process.integral(f), stream);
}

inline ParallelStepOutput<pdmp::SkeletonPoint> skeleton_async_parallel_step(
    const pdmp::SkeletonProcess& process, const pdmp::BoxRegion& w,
    std::span<const pdmp::SkeletonPoint> starts, ParRepConfig cfg, const pdmp::FlowObservable& f,
    RngStream stream) {
  cfg.window = 1.0;
  cfg.ordering = Ordering::wallclock;
  return parrep_parallel_step(process, w, starts, cfg, process.integral(f), stream);
}

inline ParallelStepOutput<pdmp::LiftedState> pdmp_sync_parallel_step(
    const pdmp::DiscretizedChain& process, const pdmp::BoxRegion& w,
    std::span<const pdmp::LiftedState> starts, ParRepConfig cfg, const pdmp::FlowObservable& f,
    RngStream stream) {
  cfg.ordering = Ordering::synchronous;
  return parrep_parallel_step(process, w, starts, cfg, f, stream);
}

inline ParallelStepOutput<pdmp::LiftedState> pdmp_async_parallel_step(
    const pdmp::DiscretizedChain& process, const pdmp::BoxRegion& w,
    std::span<const pdmp::LiftedState> starts, ParRepConfig cfg, const pdmp::FlowObservable& f,
    RngStream stream) {
  cfg.ordering = Ordering::wallclock;
  return parrep_parallel_step(process, w, starts, cfg, f, stream);
}

struct RunningTotals {
  double f_sim = 0.0;
  double T_sim = 0.0;
  std::uint64_t serial_steps = 0;  // native steps of the equivalent serial trajectory
  double parallel_units = 0.0;     // idealized wall-clock with R processors
  std::uint64_t iterations = 0;
  std::map<int, std::uint64_t> visits{};  // certified region label -> count
  std::uint64_t region_changes = 0;

  double speedup() const { return parallel_units > 0.0 ? static_cast<double>(serial_steps) / parallel_units : 1.0; }
};

struct StationaryRun {
  double estimate = 0.0;
  RunningTotals totals{};
  Trace trace{};
};

/// Alternates decorrelation and parallel steps until T_sim reaches T_stop;
/// the estimate is f_sim / T_sim. `seeds[i]` are the dephasing restart
/// states of regions[i].
template <PathProcess P, class G, class Label>
StationaryRun stationary_average(const P& process, std::span<const typename P::Region> regions,
                                 std::span<const std::vector<typename P::State>> seeds,
                                 const ParRepConfig& cfg, const G& g, const Label& label_of,
                                 typename P::State x0, RngStream stream) {
  if (seeds.size() != regions.size()) {
    throw InvalidArgument("stationary_average: one seed set per region is required");
  }
  cfg.validate();
  StationaryRun run{0.0, {}, Trace(cfg.trace_cap, cfg.trace_spill)};
  auto& tot = run.totals;
  const RngStream s_decorr = stream.derive(Purpose::decorrelation);
  const RngStream s_dephase = stream.derive(Purpose::dephase);
  const RngStream s_par = stream.derive(Purpose::parallel);
  auto t_corr_of = [&](const typename P::Region& w) { return cfg.t_corr_for(label_of(w)); };
  int previous = -1;
  while (tot.T_sim < cfg.t_stop) {
    const std::uint64_t it = tot.iterations++;
    TraceRecord rec;
    rec.iteration = it;
    const auto d = decorrelation_run(process, regions, x0, g, t_corr_of, s_decorr.derive(it));
    const auto& w = regions[d.region];
    rec.region = label_of(w);
    rec.f_decorr = d.f_decorr;
    rec.T_decorr = d.T_decorr;
    rec.decorr_steps = d.native_steps;
    tot.f_sim += d.f_decorr;
    tot.T_sim += d.T_decorr;
    tot.serial_steps += d.native_steps;
    tot.parallel_units += static_cast<double>(d.native_steps);
    ++tot.visits[rec.region];
    if (previous >= 0 && previous != rec.region) ++tot.region_changes;
    previous = rec.region;
    if (tot.T_sim >= cfg.t_stop) {
      run.trace.push(rec);
      break;
    }
    const auto q = dephase_for_step(process, w, std::span<const typename P::State>(seeds[d.region]),
                                    d.terminal, cfg, t_corr_of(w), s_dephase.derive(it));
    const auto p = parrep_parallel_step(process, w, std::span<const typename P::State>(q.samples),
                                        cfg, g, s_par.derive(it));
    rec.parallel_step = true;
    rec.f_par = p.f_par;
    rec.T_par = p.T_par;
    rec.L = p.L;
    rec.fragment_steps = p.serial_steps;
    rec.dephase_units = static_cast<double>(q.parallel_steps);
    rec.parallel_units = p.parallel_units;
    tot.f_sim += p.f_par;
    tot.T_sim += p.T_par;
    tot.serial_steps += p.serial_steps;
    tot.parallel_units += rec.dephase_units + p.parallel_units;
    run.trace.push(rec);
    x0 = p.exit;
  }
  run.estimate = tot.T_sim > 0.0 ? tot.f_sim / tot.T_sim : 0.0;
  return run;
}

/// Skeleton-chain driver: regions are tested on the position of xi, the
/// decorrelation time counts skeleton steps, fragments are single steps.
/// Dephasing restarts from the lowest point of each region.
StationaryRun skeleton_stationary_average(const pdmp::SkeletonProcess& process,
                                          std::span<const pdmp::BoxRegion> regions,
                                          ParRepConfig cfg, const pdmp::FlowObservable& f,
                                          const pdmp::SkeletonPoint& x0, RngStream stream);

/// Continuous-time driver over the discretized lifted chain.
StationaryRun pdmp_stationary_average(const pdmp::DiscretizedChain& process,
                                      std::span<const pdmp::BoxRegion> regions,
                                      const ParRepConfig& cfg, const pdmp::FlowObservable& f,
                                      const pdmp::LiftedState& z0, RngStream stream);

/// Number of native steps of a serial run with the same physical time,
/// recounted from a complete trace.
std::uint64_t recount_serial_steps(const Trace& trace);

}  // namespace parrep
