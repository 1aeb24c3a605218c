#pragma once

#include <cstdint>
#include <queue>
#include <vector>

#include "parrep/sched/wallclock.hpp"

namespace parrep {

/// Position (r, m) of a fragment in the ordered stream. `wall` is its
/// completion time for wall-clock plans.
struct Slot {
  int replica = 1;  // 1-based
  std::uint64_t segment = 0;
  double wall = 0.0;

  friend bool operator==(const Slot& a, const Slot& b) {
    return a.replica == b.replica && a.segment == b.segment;
  }
};

enum class OrderingMode { synchronous, wallclock };

/// Lazily extendable ordering k -> (r_k, m_k) of fragments across R replicas.
class OrderingPlan {
 public:
  /// m_k = floor((k-1)/R), r_k = k - R floor((k-1)/R).
  static OrderingPlan synchronous(int replicas);

  /// Sorted by completion time over the provided table. Ties go to the
  /// smaller replica index with a warning. Past the table end the plan is
  /// exhausted.
  static OrderingPlan from_table(const CompletionTable& t_wall);

  /// Extended on demand from the cost model. `segment0_costs` (size R)
  /// replaces the first segment costs when the model reads state.
  static OrderingPlan wallclock(WallClockModel model, int replicas, RngStream stream,
                                std::vector<double> segment0_costs = {});

  OrderingMode mode() const noexcept { return mode_; }
  int replicas() const noexcept { return replicas_; }

  /// The k-th slot, k >= 1. Throws SourceExhausted past a finite table.
  Slot at(std::uint64_t k);
  /// Next slot in order; the first call returns slot 1.
  Slot next() { return at(++cursor_); }
  std::uint64_t consumed() const noexcept { return cursor_; }
  void rewind() noexcept { cursor_ = 0; }

  /// t_wall^r(m) for the wall-clock plans, m + 1 for the synchronous plan.
  double completion(int replica, std::uint64_t segment);
  /// Number of equal-time adjacent pairs seen so far.
  std::uint64_t ties() const noexcept { return ties_; }

 private:
  struct Pending {
    double wall;
    int replica;
    std::uint64_t segment;
    bool operator>(const Pending& o) const {
      if (wall != o.wall) return wall > o.wall;
      return replica > o.replica;
    }
  };

  OrderingPlan() = default;
  void extend_to(std::uint64_t k);
  void note_tie(const Slot& prev, const Slot& cur);
  double lazy_completion(int replica, std::uint64_t segment);

  OrderingMode mode_ = OrderingMode::synchronous;
  int replicas_ = 1;
  bool finite_ = false;
  bool warned_ = false;
  std::uint64_t cursor_ = 0;
  std::uint64_t ties_ = 0;
  std::vector<Slot> slots_{};
  CompletionTable table_{};

  // Lazy wall-clock state.
  WallClockModel model_{};
  RngStream stream_{};
  std::vector<double> segment0_{};
  std::priority_queue<Pending, std::vector<Pending>, std::greater<>> heap_{};
  MeasuredClock host_{};
  double host_last_ = 0.0;
};

}  // namespace parrep
