#include <gtest/gtest.h>

#include <set>
#include <vector>

#include "parrep/harness/stats.hpp"
#include "parrep/process/rng.hpp"

using namespace parrep;

TEST(Rng, SameKeySameDraws) {
  Rng a = RngStream(42).derive(Purpose::serial).at(7);
  Rng b = RngStream(42).derive(Purpose::serial).at(7);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(a(), b());
}

TEST(Rng, DerivedStreamsDiffer) {
  const RngStream root(1);
  std::set<std::uint64_t> keys;
  for (std::uint64_t t = 0; t < 1000; ++t) keys.insert(root.derive(t).key());
  keys.insert(root.derive(Purpose::serial).key());
  keys.insert(root.derive(Purpose::parallel).key());
  EXPECT_EQ(keys.size(), 1002u);
  EXPECT_NE(RngStream(1).key(), RngStream(2).key());
}

TEST(Rng, CounterAccessIsOrderFree) {
  const RngStream s(9);
  std::vector<std::uint64_t> forward, backward(50);
  for (std::uint64_t n = 0; n < 50; ++n) forward.push_back(s.at(n)());
  for (std::uint64_t n = 50; n-- > 0;) backward[n] = s.at(n)();
  EXPECT_EQ(forward, backward);
}

TEST(Rng, UniformRanges) {
  Rng r = RngStream(3).at(0);
  for (int i = 0; i < 100000; ++i) {
    const double u = r.uniform();
    ASSERT_GE(u, 0.0);
    ASSERT_LT(u, 1.0);
    const double v = r.uniform_open();
    ASSERT_GT(v, 0.0);
    ASSERT_LT(v, 1.0);
  }
}

TEST(Rng, BelowIsUniform) {
  Rng r = RngStream(4).at(0);
  std::vector<double> counts(7, 0.0);
  for (int i = 0; i < 70000; ++i) {
    const auto k = r.below(7);
    ASSERT_LT(k, 7u);
    counts[k] += 1.0;
  }
  const std::vector<double> p(7, 1.0 / 7.0);
  EXPECT_GT(stats::chi_square_gof(counts, p).p_value, 0.01);
}

TEST(Rng, ExponentialMean) {
  Rng r = RngStream(5).at(0);
  std::vector<double> xs;
  for (int i = 0; i < 20000; ++i) xs.push_back(r.exponential(2.0));
  const auto s = stats::summarize(xs);
  EXPECT_NEAR(s.mean, 0.5, 3.0 * s.sem);
}
