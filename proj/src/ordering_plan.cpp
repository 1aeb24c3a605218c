#include "parrep/sched/ordering_plan.hpp"

#include <algorithm>
#include <string>

#include "parrep/errors.hpp"
#include "parrep/log.hpp"

namespace parrep {

OrderingPlan OrderingPlan::synchronous(int replicas) {
  if (replicas < 1) throw InvalidArgument("OrderingPlan: need at least one replica");
  OrderingPlan p;
  p.mode_ = OrderingMode::synchronous;
  p.replicas_ = replicas;
  return p;
}

OrderingPlan OrderingPlan::from_table(const CompletionTable& t_wall) {
  if (t_wall.empty()) throw InvalidArgument("OrderingPlan: empty completion table");
  OrderingPlan p;
  p.mode_ = OrderingMode::wallclock;
  p.replicas_ = static_cast<int>(t_wall.size());
  p.finite_ = true;
  p.table_ = t_wall;
  for (std::size_t r = 0; r < t_wall.size(); ++r) {
    const auto& row = t_wall[r];
    for (std::size_t m = 0; m < row.size(); ++m) {
      if (m > 0 && row[m] < row[m - 1]) {
        throw MonotonicityViolation("OrderingPlan: completion times of replica " +
                                    std::to_string(r + 1) + " decrease at segment " +
                                    std::to_string(m));
      }
      p.slots_.push_back({static_cast<int>(r + 1), m, row[m]});
    }
  }
  std::stable_sort(p.slots_.begin(), p.slots_.end(), [](const Slot& a, const Slot& b) {
    if (a.wall != b.wall) return a.wall < b.wall;
    if (a.replica != b.replica) return a.replica < b.replica;
    return a.segment < b.segment;
  });
  for (std::size_t i = 1; i < p.slots_.size(); ++i) p.note_tie(p.slots_[i - 1], p.slots_[i]);
  return p;
}

OrderingPlan OrderingPlan::wallclock(WallClockModel model, int replicas, RngStream stream,
                                     std::vector<double> segment0_costs) {
  if (replicas < 1) throw InvalidArgument("OrderingPlan: need at least one replica");
  model.validate();
  if (model.reads_state() && segment0_costs.size() != static_cast<std::size_t>(replicas)) {
    throw InvalidArgument("OrderingPlan: the state-coupled mode needs one segment-0 cost per replica");
  }
  if (!segment0_costs.empty() && !model.reads_state()) {
    throw InvalidArgument("OrderingPlan: segment-0 state costs given to a state-free model");
  }
  OrderingPlan p;
  p.mode_ = OrderingMode::wallclock;
  p.replicas_ = replicas;
  p.model_ = std::move(model);
  p.stream_ = stream;
  p.segment0_ = std::move(segment0_costs);
  p.table_.resize(static_cast<std::size_t>(replicas));
  for (int r = 1; r <= replicas; ++r) p.heap_.push({p.lazy_completion(r, 0), r, 0});
  return p;
}

double OrderingPlan::lazy_completion(int replica, std::uint64_t segment) {
  auto& row = table_[static_cast<std::size_t>(replica - 1)];
  while (row.size() <= segment) {
    const std::uint64_t m = row.size();
    double c = 0.0;
    if (m == 0 && !segment0_.empty()) {
      c = segment0_[static_cast<std::size_t>(replica - 1)];
    } else if (model_.mode == WallClockMode::measured) {
      // Host time spent since the previous extension, i.e. mostly fragment work.
      const double now = host_.now();
      c = std::max(now - host_last_, 1e-9);
      host_last_ = now;
    } else {
      c = model_.cost(replica, m, stream_);
    }
    if (!(c > 0.0)) throw MonotonicityViolation("OrderingPlan: nonpositive segment cost");
    row.push_back((row.empty() ? 0.0 : row.back()) + c);
  }
  return row[segment];
}

void OrderingPlan::note_tie(const Slot& prev, const Slot& cur) {
  if (prev.wall != cur.wall) return;
  ++ties_;
  if (!warned_) {
    warned_ = true;
    log::warn("equal wall-clock completion times for replicas " + std::to_string(prev.replica) +
              " and " + std::to_string(cur.replica) + "; ordered by replica index");
  }
}

void OrderingPlan::extend_to(std::uint64_t k) {
  while (slots_.size() < k) {
    const Pending top = heap_.top();
    heap_.pop();
    const Slot s{top.replica, top.segment, top.wall};
    if (!slots_.empty()) note_tie(slots_.back(), s);
    slots_.push_back(s);
    heap_.push({lazy_completion(top.replica, top.segment + 1), top.replica, top.segment + 1});
  }
}

Slot OrderingPlan::at(std::uint64_t k) {
  if (k == 0) throw InvalidArgument("OrderingPlan: slots are numbered from 1");
  if (mode_ == OrderingMode::synchronous) {
    const std::uint64_t R = static_cast<std::uint64_t>(replicas_);
    const std::uint64_t m = (k - 1) / R;
    return {static_cast<int>(k - R * m), m, static_cast<double>(m + 1)};
  }
  if (finite_) {
    if (k > slots_.size()) {
      throw SourceExhausted("OrderingPlan: completion table exhausted after " +
                            std::to_string(slots_.size()) + " slots");
    }
    return slots_[k - 1];
  }
  extend_to(k);
  return slots_[k - 1];
}

double OrderingPlan::completion(int replica, std::uint64_t segment) {
  if (replica < 1 || replica > replicas_) throw InvalidArgument("OrderingPlan: replica out of range");
  if (mode_ == OrderingMode::synchronous) return static_cast<double>(segment + 1);
  if (finite_) {
    const auto& row = table_[static_cast<std::size_t>(replica - 1)];
    if (segment >= row.size()) throw SourceExhausted("OrderingPlan: segment beyond the table");
    return row[segment];
  }
  return lazy_completion(replica, segment);
}

}  // namespace parrep
