#include <gtest/gtest.h>

#include <cmath>

#include "parrep/errors.hpp"
#include "parrep/pdmp/geometry.hpp"
#include "parrep/process/rng.hpp"

using namespace parrep;
using namespace parrep::pdmp;

TEST(Geometry, WrapRange) {
  EXPECT_EQ(wrap(0.25), 0.25);
  EXPECT_EQ(wrap(-0.25), 0.75);
  EXPECT_EQ(wrap(3.5), 0.5);
  EXPECT_LT(wrap(-1e-300), 1.0);
}

TEST(Geometry, WholePeriodShiftIsBitExact) {
  Rng r = RngStream(11).at(0);
  for (int i = 0; i < 10000; ++i) {
    const TorusPoint p{r(), r()};
    EXPECT_EQ(p.advanced({1.0, -3.0}), p);
    EXPECT_EQ(advance_turns(p.x, 1.0), p.x);
    const double d = r.uniform() * 10.0 - 5.0;
    EXPECT_EQ(advance_turns(advance_turns(p.x, d), -d), p.x);
  }
}

TEST(Geometry, TurnsRoundTrip) {
  for (double x : {0.0, 0.1, 0.25, 0.5, 0.999999, 0.75}) {
    EXPECT_NEAR(from_turns(to_turns(x)), x, 0x1.0p-52);
  }
  EXPECT_EQ(to_turns(1.0), to_turns(0.0));
}

TEST(Geometry, BoxHalfOpenAndPeriodic) {
  const Box b({0.5, 0.5}, {0.5, 0.5});
  EXPECT_TRUE(b.contains(Vec2{0.5, 0.5}));
  EXPECT_TRUE(b.contains(Vec2{0.99, 0.75}));
  EXPECT_FALSE(b.contains(Vec2{0.49, 0.75}));
  EXPECT_FALSE(b.contains(Vec2{0.75, 1.0}));
  const Box wrapped({0.75, 0.0}, {0.5, 1.0});
  EXPECT_TRUE(wrapped.contains(Vec2{0.1, 0.3}));
  EXPECT_TRUE(wrapped.contains(Vec2{0.8, 0.3}));
  EXPECT_FALSE(wrapped.contains(Vec2{0.5, 0.3}));
  EXPECT_THROW(Box({0, 0}, {0.0, 1.0}), InvalidArgument);
}

TEST(Geometry, FirstExitAlongRay) {
  const Box b({0.5, 0.5}, {0.5, 0.5});
  const auto p = TorusPoint::from({0.75, 0.75});
  const auto hit = b.first_exit(p, {1.0, 0.0}, 10.0);
  ASSERT_TRUE(hit.has_value());
  EXPECT_NEAR(hit->time, 0.25, 1e-15);
  EXPECT_FALSE(b.contains(hit->point));
  EXPECT_EQ(basin_label(hit->point), 2);
  EXPECT_FALSE(b.first_exit(p, {1.0, 0.0}, 0.2).has_value());
  const auto down = b.first_exit(p, {0.0, -2.0}, 10.0);
  ASSERT_TRUE(down.has_value());
  EXPECT_NEAR(down->time, 0.125, 1e-15);
  EXPECT_FALSE(b.contains(down->point));
  EXPECT_EQ(basin_label(down->point), 3);
}

TEST(Geometry, TimeInsideCountsEveryLap) {
  const Box b({0.5, 0.0}, {0.5, 1.0});
  EXPECT_NEAR(b.time_inside({0.25, 0.3}, {1.0, 0.0}, 2.0), 1.0, 1e-12);
  EXPECT_NEAR(b.time_inside({0.25, 0.3}, {1.0, 0.0}, 0.5), 0.25, 1e-12);
  EXPECT_NEAR(b.time_inside({0.75, 0.3}, {-2.0, 0.0}, 0.25), 0.125, 1e-12);
  EXPECT_NEAR(b.time_inside({0.75, 0.3}, {0.0, 1.0}, 3.0), 3.0, 1e-12);
}

TEST(Geometry, QuarterBasins) {
  EXPECT_EQ(basin_label(Vec2{0.75, 0.75}), 1);
  EXPECT_EQ(basin_label(Vec2{0.25, 0.75}), 2);
  EXPECT_EQ(basin_label(Vec2{0.75, 0.25}), 3);
  EXPECT_EQ(basin_label(Vec2{0.25, 0.25}), 4);
  EXPECT_EQ(basin_label(Vec2{1.75, -0.25}), 1);
  for (int l = 1; l <= 4; ++l) {
    const auto w = quarter_basin(l);
    EXPECT_EQ(w.label, l);
    EXPECT_EQ(region_label(w), "W" + std::to_string(l));
  }
  EXPECT_THROW(quarter_basin(5), InvalidArgument);
}
