#include <gtest/gtest.h>

#include <vector>

#include "parrep/errors.hpp"
#include "parrep/harness/stats.hpp"
#include "parrep/process/discrete_process.hpp"
#include "parrep/process/serial.hpp"

using namespace parrep;

namespace {

struct IsOne {
  double operator()(const std::int64_t& x) const { return x == 1 ? 1.0 : 0.0; }
};

}  // namespace

TEST(ProcessCore, WalkExitsToNeighbours) {
  const RandomWalkProcess p;
  const auto w = integer_interval(0, 1);
  for (std::uint64_t s = 0; s < 200; ++s) {
    const auto e = serial_first_exit(p, w, std::int64_t{0}, IsOne{}, RngStream(s), 1e6);
    ASSERT_TRUE(e.event.exit_state == -1 || e.event.exit_state == 2);
    ASSERT_GE(e.event.time, 1.0);
    ASSERT_EQ(e.native_steps, static_cast<std::uint64_t>(e.event.time));
  }
}

TEST(ProcessCore, ExitTimeMeanFromUniformStart) {
  const RandomWalkProcess p;
  const auto w = integer_interval(0, 1);
  std::vector<double> t;
  for (std::uint64_t s = 0; s < 20000; ++s) {
    const std::int64_t x0 = static_cast<std::int64_t>(s % 2);
    t.push_back(serial_first_exit(p, w, x0, IsOne{}, RngStream(s), 1e6).event.time);
  }
  const auto sum = stats::summarize(t);
  EXPECT_NEAR(sum.mean, 2.0, 3.0 * sum.sem);
}

TEST(ProcessCore, WindowPartitionReproducesSerialPath) {
  const RandomWalkProcess p;
  const auto w = integer_interval(-5, 5);
  for (std::uint64_t s = 0; s < 50; ++s) {
    const RngStream stream(s);
    const auto serial = serial_first_exit(p, w, std::int64_t{0}, IsOne{}, stream, 1e6);
    for (double window : {1.0, 3.0, 7.0}) {
      auto z = p.spawn(0, stream);
      double t = 0.0, g = 0.0;
      for (;;) {
        auto seg = p.evolve(std::move(z), window, w, IsOne{});
        g += seg.accumulated;
        if (seg.escaped) {
          t += seg.elapsed;
          EXPECT_EQ(p.state(seg.end), serial.event.exit_state);
          break;
        }
        t += seg.elapsed;
        z = std::move(seg.end);
      }
      EXPECT_EQ(t, serial.event.time);
      EXPECT_EQ(g, serial.g_accum);
    }
  }
}

TEST(ProcessCore, FragmentTruncation) {
  const RandomWalkProcess p;
  const auto w = integer_interval(0, 3);
  for (std::uint64_t s = 0; s < 500; ++s) {
    const auto f = evolve_segment(p, w, std::int64_t{1}, 4.0, IsOne{}, RngStream(s));
    EXPECT_EQ(f.path.front(), 1);
    if (f.escaped) {
      ASSERT_TRUE(f.exit_state.has_value());
      EXPECT_LE(f.internal_exit_time, f.duration);
      EXPECT_FALSE(w.contains(*f.exit_state));
      EXPECT_EQ(f.path.back(), *f.exit_state);
    } else {
      EXPECT_EQ(f.path.size(), 5u);
      EXPECT_FALSE(f.exit_state.has_value());
    }
    EXPECT_EQ(f.accumulated, accumulate(std::span<const std::int64_t>(f.path), IsOne{}));
  }
}

TEST(ProcessCore, CapExceeded) {
  const RandomWalkProcess p;
  EXPECT_THROW(serial_first_exit(p, p.whole_space(), std::int64_t{0}, IsOne{}, RngStream(1), 100.0),
               CapExceeded);
}

TEST(ProcessCore, StartOutsideRegionRejected) {
  const RandomWalkProcess p;
  EXPECT_THROW(serial_first_exit(p, integer_interval(0, 1), std::int64_t{5}, IsOne{}, RngStream(1), 10.0),
               InvalidArgument);
}

TEST(ProcessCore, AccumulateSkipsTerminal) {
  const std::vector<std::int64_t> path{1, 1, 0, 1};
  EXPECT_EQ(accumulate(std::span<const std::int64_t>(path), IsOne{}), 2.0);
  EXPECT_THROW(accumulate(std::span<const std::int64_t>(), IsOne{}), InvalidArgument);
}
