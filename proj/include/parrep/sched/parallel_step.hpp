#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "parrep/errors.hpp"
#include "parrep/process/serial.hpp"
#include "parrep/process/types.hpp"
#include "parrep/sched/ordering_plan.hpp"

namespace parrep {

template <class S>
struct ParallelStepResult {
  double g_par = 0.0;
  double T_par = 0.0;        // physical time
  double native_time = 0.0;  // t_1 + ... + t_{L-1} + T_L on the native axis
  S X_par{};
  std::uint64_t L = 0;
  std::uint64_t fragments_consumed = 0;
  Slot last{};                       // (r_L, m_L)
  std::uint64_t native_steps = 0;    // steps inside fragments 1..L
  std::uint64_t last_fragment_steps = 0;
};

/// Consumes fragments in plan order until the first one that escapes.
/// `source(slot)` must return the fragment (r, m) named by the slot.
template <class Source>
auto general_parallel_step(Source&& source, OrderingPlan& plan,
                           std::uint64_t max_fragments = kDefaultStepCap) {
  using FragmentT = decltype(source(std::declval<const Slot&>()));
  using S = std::decay_t<decltype(std::declval<FragmentT>().start_state)>;
  ParallelStepResult<S> out;
  while (out.fragments_consumed < max_fragments) {
    const Slot slot = plan.next();
    FragmentT f = source(slot);
    ++out.fragments_consumed;
    f.order_index = out.fragments_consumed;
    out.g_par += f.accumulated;
    out.T_par += f.physical_time;
    out.native_steps += f.native_steps;
    if (f.escaped) {
      out.native_time += f.internal_exit_time;
      out.X_par = *f.exit_state;
      out.L = out.fragments_consumed;
      out.last = slot;
      out.last_fragment_steps = f.native_steps;
      return out;
    }
    out.native_time += f.duration;
  }
  throw CapExceeded("general_parallel_step: no escape within " + std::to_string(max_fragments) +
                    " fragments");
}

/// Fragment (r, m) of replica r's path from its start state over
/// [m dt, (m+1) dt]. Replicas are advanced incrementally, so the plan must
/// request each replica's segments in increasing order.
template <PathProcess P, class G>
class ReplicaFragmentSource {
 public:
  using State = typename P::State;
  using FragmentT = Fragment<State, typename P::Path>;

  ReplicaFragmentSource(const P& process, typename P::Region region,
                        std::span<const State> starts, double window, G g,
                        const RngStream& stream, bool record_paths = false)
      : process_(&process),
        region_(std::move(region)),
        window_(window),
        g_(std::move(g)),
        record_(record_paths) {
    if (starts.empty()) throw InvalidArgument("ReplicaFragmentSource: no start states");
    if (!(window > 0.0)) throw InvalidArgument("ReplicaFragmentSource: window must be positive");
    particles_.reserve(starts.size());
    for (std::size_t r = 0; r < starts.size(); ++r) {
      if (!process.contains(region_, starts[r])) {
        throw InvalidArgument("ReplicaFragmentSource: start state outside the region");
      }
      particles_.push_back(process.spawn(starts[r], stream.derive(r + 1)));
    }
    next_.assign(starts.size(), 0);
    done_.assign(starts.size(), false);
  }

  int replicas() const noexcept { return static_cast<int>(particles_.size()); }

  FragmentT operator()(const Slot& slot) {
    const auto r = static_cast<std::size_t>(slot.replica - 1);
    if (r >= particles_.size()) throw InvalidArgument("ReplicaFragmentSource: replica out of range");
    if (slot.segment != next_[r]) {
      throw MonotonicityViolation("ReplicaFragmentSource: replica " +
                                  std::to_string(slot.replica) + " asked for segment " +
                                  std::to_string(slot.segment) + ", expected " +
                                  std::to_string(next_[r]));
    }
    if (done_[r]) throw InvalidArgument("ReplicaFragmentSource: replica already escaped");
    FragmentT f;
    f.replica = slot.replica;
    f.segment = slot.segment;
    f.duration = window_;
    f.start_state = process_->state(particles_[r]);
    auto seg = process_->evolve(std::move(particles_[r]), window_, region_, g_,
                                record_ ? &f.path : nullptr);
    f.escaped = seg.escaped;
    f.accumulated = seg.accumulated;
    f.physical_time = seg.physical_time;
    f.native_steps = seg.native_steps;
    if (seg.escaped) {
      f.internal_exit_time = seg.elapsed;
      f.exit_state = process_->state(seg.end);
      done_[r] = true;
    }
    particles_[r] = std::move(seg.end);
    ++next_[r];
    return f;
  }

 private:
  const P* process_;
  typename P::Region region_;
  double window_;
  G g_;
  bool record_;
  std::vector<typename P::Particle> particles_;
  std::vector<std::uint64_t> next_;
  std::vector<bool> done_;
};

}  // namespace parrep
