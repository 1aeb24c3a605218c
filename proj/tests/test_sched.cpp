#include <gtest/gtest.h>

#include <map>
#include <string>
#include <vector>

#include "parrep/errors.hpp"
#include "parrep/log.hpp"
#include "parrep/process/discrete_process.hpp"
#include "parrep/sched/ordering_plan.hpp"
#include "parrep/sched/parallel_step.hpp"

using namespace parrep;

TEST(OrderingPlan, SynchronousFormula) {
  for (int R : {1, 3, 8}) {
    auto plan = OrderingPlan::synchronous(R);
    for (std::uint64_t k = 1; k <= 100; ++k) {
      const auto m = (k - 1) / static_cast<std::uint64_t>(R);
      const Slot s = plan.next();
      EXPECT_EQ(s.segment, m);
      EXPECT_EQ(static_cast<std::uint64_t>(s.replica), k - static_cast<std::uint64_t>(R) * m);
    }
  }
  EXPECT_THROW(OrderingPlan::synchronous(0), InvalidArgument);
}

TEST(OrderingPlan, FromTableSortsAndBreaksTies) {
  std::vector<std::string> warnings;
  log::set_warning_handler([&](std::string_view w) { warnings.emplace_back(w); });
  const CompletionTable t{{1.0, 3.0, 4.0}, {0.5, 3.0, 6.0}};
  auto plan = OrderingPlan::from_table(t);
  const std::vector<std::pair<int, std::uint64_t>> expect{{2, 0}, {1, 0}, {1, 1}, {2, 1}, {1, 2}, {2, 2}};
  for (const auto& [r, m] : expect) {
    const Slot s = plan.next();
    EXPECT_EQ(s.replica, r);
    EXPECT_EQ(s.segment, m);
  }
  EXPECT_EQ(plan.ties(), 1u);
  EXPECT_EQ(warnings.size(), 1u);
  EXPECT_THROW(plan.next(), SourceExhausted);
  log::set_warning_handler([](std::string_view) {});
}

TEST(OrderingPlan, NonMonotoneTableRejected) {
  EXPECT_THROW(OrderingPlan::from_table({{1.0, 0.5}}), MonotonicityViolation);
  EXPECT_THROW(OrderingPlan::from_table({}), InvalidArgument);
}

TEST(OrderingPlan, UnitCostsReproduceSynchronousOrder) {
  auto unit = OrderingPlan::wallclock({WallClockMode::unit, 1.0, {}}, 4, RngStream(1));
  auto sync = OrderingPlan::synchronous(4);
  for (int k = 0; k < 200; ++k) EXPECT_EQ(unit.next(), sync.next());
}

TEST(OrderingPlan, WallclockPlanIsSurjectiveAndMonotone) {
  for (const WallClockModel& model :
       {WallClockModel{WallClockMode::iid_random, 1.0, {}},
        WallClockModel{WallClockMode::replica_heterogeneous, 1.0, {1.0, 2.0, 4.0}}}) {
    auto plan = OrderingPlan::wallclock(model, 3, RngStream(7));
    std::map<int, std::uint64_t> next_segment;
    double last = -1.0;
    for (int k = 0; k < 3000; ++k) {
      const Slot s = plan.next();
      EXPECT_EQ(s.segment, next_segment[s.replica]++);
      EXPECT_GE(s.wall, last);
      EXPECT_EQ(s.wall, plan.completion(s.replica, s.segment));
      last = s.wall;
    }
    for (int r = 1; r <= 3; ++r) EXPECT_GT(next_segment[r], 100u);
  }
}

TEST(OrderingPlan, WallclockIsDeterministic) {
  const WallClockModel model{WallClockMode::iid_random, 2.0, {}};
  auto a = OrderingPlan::wallclock(model, 5, RngStream(3));
  auto b = OrderingPlan::wallclock(model, 5, RngStream(3));
  for (int k = 0; k < 500; ++k) {
    const Slot x = a.next(), y = b.next();
    EXPECT_EQ(x, y);
    EXPECT_EQ(x.wall, y.wall);
  }
}

TEST(OrderingPlan, StateCoupledNeedsCosts) {
  const WallClockModel coupled{WallClockMode::state_coupled_invalid, 1.0, {}};
  EXPECT_THROW(OrderingPlan::wallclock(coupled, 2, RngStream(1)), InvalidArgument);
  auto plan = OrderingPlan::wallclock(coupled, 2, RngStream(1), {1.0, 0.5});
  EXPECT_EQ(plan.next().replica, 2);
}

TEST(WallClock, ModelValidation) {
  EXPECT_THROW((WallClockModel{WallClockMode::replica_heterogeneous, 1.0, {}}.validate()),
               InvalidArgument);
  EXPECT_THROW((WallClockModel{WallClockMode::iid_random, 0.0, {}}.validate()), InvalidArgument);
  EXPECT_EQ(parse_wallclock_mode(to_string(WallClockMode::iid_random)), WallClockMode::iid_random);
  EXPECT_THROW(parse_wallclock_mode("nope"), ConfigError);
  const auto t = simulate_wallclock({WallClockMode::iid_random, 1.0, {}}, 3, 20, RngStream(2));
  ASSERT_EQ(t.size(), 3u);
  for (const auto& row : t) {
    ASSERT_EQ(row.size(), 21u);
    for (std::size_t m = 1; m < row.size(); ++m) EXPECT_GT(row[m], row[m - 1]);
  }
}

namespace {

// Scripted fragments: replica r escapes at step `escape_at[r-1]` of its
// path (1-based), fragments cover `window` steps.
struct ScriptedSource {
  std::vector<std::uint64_t> escape_at;
  std::uint64_t window = 2;
  Fragment<int, std::vector<int>> operator()(const Slot& s) const {
    Fragment<int, std::vector<int>> f;
    f.replica = s.replica;
    f.segment = s.segment;
    f.duration = static_cast<double>(window);
    const std::uint64_t begin = s.segment * window;
    const std::uint64_t e = escape_at[static_cast<std::size_t>(s.replica - 1)];
    if (e > begin && e <= begin + window) {
      f.escaped = true;
      f.internal_exit_time = static_cast<double>(e - begin);
      f.exit_state = 100 + s.replica;
      f.native_steps = e - begin;
    } else {
      f.native_steps = window;
    }
    f.physical_time = static_cast<double>(f.native_steps);
    f.accumulated = f.physical_time;
    return f;
  }
};

}  // namespace

TEST(ParallelStep, SynchronousSplice) {
  ScriptedSource src{{7, 3, 9}, 2};
  auto plan = OrderingPlan::synchronous(3);
  const auto res = general_parallel_step(src, plan);
  // Row 0: r1, r2, r3 survive; row 1: r1 survives, r2 escapes at step 3.
  EXPECT_EQ(res.L, 5u);
  EXPECT_EQ(res.last.replica, 2);
  EXPECT_EQ(res.last.segment, 1u);
  EXPECT_EQ(res.X_par, 102);
  EXPECT_EQ(res.T_par, 2.0 * 4 + 1.0);
  EXPECT_EQ(res.native_time, res.T_par);
  EXPECT_EQ(res.g_par, res.T_par);
  EXPECT_EQ(res.last_fragment_steps, 1u);
}

TEST(ParallelStep, CapOnFragments) {
  ScriptedSource src{{1000000}, 1};
  auto plan = OrderingPlan::synchronous(1);
  EXPECT_THROW(general_parallel_step(src, plan, 10), CapExceeded);
}

TEST(ParallelStep, ReplicaSourceRejectsBadInput) {
  const RandomWalkProcess p;
  const auto w = integer_interval(0, 1);
  const std::vector<std::int64_t> outside{5};
  EXPECT_THROW((ReplicaFragmentSource<RandomWalkProcess, ZeroObservable>(
                   p, w, outside, 1.0, {}, RngStream(1))),
               InvalidArgument);
  const std::vector<std::int64_t> ok{0};
  EXPECT_THROW((ReplicaFragmentSource<RandomWalkProcess, ZeroObservable>(p, w, ok, 0.0, {},
                                                                         RngStream(1))),
               InvalidArgument);
}

TEST(ParallelStep, ReplicaSourceMatchesSerialPaths) {
  const RandomWalkProcess p;
  const auto w = integer_interval(-3, 3);
  const std::vector<std::int64_t> starts{0, 1, -1};
  const RngStream stream(77);
  ReplicaFragmentSource<RandomWalkProcess, UnitObservable> src(p, w, starts, 2.0, {}, stream, true);
  auto plan = OrderingPlan::synchronous(3);
  const auto res = general_parallel_step(src, plan);
  // The escaping replica's fragments concatenate to its serial path.
  const int r = res.last.replica;
  const auto serial = serial_first_exit(p, w, starts[static_cast<std::size_t>(r - 1)],
                                        UnitObservable{}, stream.derive(static_cast<std::uint64_t>(r)), 1e6);
  EXPECT_EQ(res.X_par, serial.event.exit_state);
  EXPECT_EQ(static_cast<double>(res.last.segment) * 2.0 +
                static_cast<double>(res.last_fragment_steps),
            serial.event.time);
}
