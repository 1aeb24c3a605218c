#include <gtest/gtest.h>

#include <cmath>
#include <vector>

#include "parrep/errors.hpp"
#include "parrep/harness/stats.hpp"
#include "parrep/pdmp/lifted_pdmp.hpp"
#include "parrep/pdmp/residuals.hpp"

using namespace parrep;
using namespace parrep::pdmp;

namespace {

struct ConstantRate {
  using State = int;
  double rate = 1.5;
  double bound = 3.0;
  double rate_along(const int&, double) const { return rate; }
  double rate_bound() const { return bound; }
};

}  // namespace

TEST(Potential, Minima) {
  const PeriodicPotential v;
  EXPECT_NEAR(v({0.75, 0.75}), -2.4, 1e-14);
  EXPECT_NEAR(v({0.25, 0.75}), -2.0, 1e-14);
  EXPECT_NEAR(v({0.75, 0.25}), -2.0, 1e-14);
  EXPECT_NEAR(v({0.25, 0.25}), -1.6, 1e-14);
  EXPECT_NEAR(v.minimum(), -2.4, 1e-12);
  const Vec2 m = argmin_in(v, quarter_basin(1).box);
  EXPECT_NEAR(m.x, 0.75, 1e-7);
  EXPECT_NEAR(m.y, 0.75, 1e-7);
}

TEST(Potential, GradientMatchesFiniteDifference) {
  const PeriodicPotential v;
  for (double x : {0.1, 0.33, 0.6, 0.92}) {
    const double h = 1e-6;
    const double fd = (v.axis(x + h) - v.axis(x - h)) / (2 * h);
    EXPECT_NEAR(v.axis_derivative(x), fd, 1e-6);
    EXPECT_LE(std::abs(v.axis_derivative(x)), v.derivative_bound());
  }
}

TEST(LiftedPdmp, DirectionsMustSumToZero) {
  EXPECT_THROW(LiftedMetropolisPdmp(1.0, {}, {{1, 0}, {0, 1}}), InvalidArgument);
  EXPECT_THROW(LiftedMetropolisPdmp(-1.0), InvalidArgument);
  const LiftedMetropolisPdmp m(3.0);
  const int n = m.direction_count();
  for (int k = 0; k < n; ++k) {
    EXPECT_EQ(m.partial_sum(k, n - 1), (Vec2{0.0, 0.0}));
  }
}

TEST(LiftedPdmp, RateIsMaxOfPartialForcesAndBounded) {
  const LiftedMetropolisPdmp m(3.0);
  for (int a = 0; a < 50; ++a) {
    for (int b = 0; b < 50; ++b) {
      const Vec2 x{a / 50.0 + 0.003, b / 50.0 + 0.007};
      for (int k = 0; k < m.direction_count(); ++k) {
        double best = 0.0;
        for (int l = 0; l < m.direction_count(); ++l) best = std::max(best, m.F(x, k, l));
        EXPECT_DOUBLE_EQ(m.switching_rate(x, k), best);
        EXPECT_LE(m.switching_rate(x, k), m.rate_bound());
      }
    }
  }
}

TEST(LiftedPdmp, RateIdentityResidual) {
  const LiftedMetropolisPdmp m(3.0);
  const double scale = 3.0 * m.potential().derivative_bound() * std::sqrt(2.0);
  for (int a = 0; a < 40; ++a) {
    for (int k = 0; k < 4; ++k) {
      const Vec2 x{a / 40.0, std::fmod(a * 0.37, 1.0)};
      EXPECT_LT(std::abs(lifted_rate_identity_residual(m, x, k)) / scale, 1e-12);
    }
  }
}

TEST(LiftedPdmp, FlowAndJump) {
  const LiftedMetropolisPdmp m(1.0);
  const auto z = lifted_state({0.9, 0.2}, 0);
  const auto f = m.flow(z, 0.25);
  EXPECT_NEAR(f.position().x, 0.15, 1e-15);
  EXPECT_EQ(f.k, 0);
  EXPECT_EQ(m.jump(z).k, 3);
  EXPECT_EQ(m.jump(lifted_state({0, 0}, 2)).k, 1);
}

TEST(Thinning, ConstantRateIsExponential) {
  const ConstantRate rate;
  Rng rng = RngStream(21).at(0);
  std::vector<double> xs;
  for (int i = 0; i < 20000; ++i) xs.push_back(sample_holding_time(rate, 0, rng));
  const auto t = stats::ks_test(xs, [](double x) { return 1.0 - std::exp(-1.5 * x); });
  EXPECT_GT(t.p_value, 0.01);
}

TEST(Thinning, BoundViolationAndCap) {
  Rng rng = RngStream(22).at(0);
  EXPECT_THROW(sample_holding_time(ConstantRate{3.0, 1.0}, 0, rng), BoundViolated);
  EXPECT_THROW(sample_holding_time(ConstantRate{0.0, 0.0}, 0, rng), CapExceeded);
  EXPECT_THROW(sample_holding_time(ConstantRate{1e-9, 1.0}, 0, rng, 10.0), CapExceeded);
  const LiftedMetropolisPdmp flat(3.0, PeriodicPotential{0.0, 0.0});
  EXPECT_THROW(sample_holding_time(flat, lifted_state({0.1, 0.1}, 0), rng), CapExceeded);
}

TEST(Thinning, SurvivalMatchesIntegratedRate) {
  const LiftedMetropolisPdmp m(3.0);
  const auto z = lifted_state({0.6, 0.7}, 0);
  Rng rng = RngStream(23).at(0);
  constexpr int n = 100000;
  std::vector<double> xs;
  for (int i = 0; i < n; ++i) xs.push_back(sample_holding_time(m, z, rng));
  std::sort(xs.begin(), xs.end());
  // Integrated rate by composite Simpson on a fine grid.
  auto cumulative = [&](double r) {
    const int steps = 20000;
    const double h = r / steps;
    double s = m.rate_along(z, 0) + m.rate_along(z, r);
    for (int i = 1; i < steps; ++i) s += (i % 2 ? 4.0 : 2.0) * m.rate_along(z, i * h);
    return s * h / 3.0;
  };
  for (int c = 1; c <= 10; ++c) {
    const double r = xs[static_cast<std::size_t>(n * c / 11)];
    const double survival = std::exp(-cumulative(r));
    const double empirical =
        static_cast<double>(xs.end() - std::upper_bound(xs.begin(), xs.end(), r)) / n;
    const double sigma = std::sqrt(survival * (1.0 - survival) / n);
    EXPECT_LT(std::abs(empirical - survival), 3.0 * sigma + 1.0 / n) << "checkpoint " << r;
  }
}

TEST(Skeleton, StepFlowsThenJumps) {
  const LiftedMetropolisPdmp m(3.0);
  Rng rng = RngStream(30).at(0);
  auto p = skeleton_start(m, lifted_state({0.7, 0.8}, 1), rng);
  for (int i = 0; i < 100; ++i) {
    Rng r = RngStream(31).at(static_cast<std::uint64_t>(i));
    const auto next = skeleton_step(m, p, r);
    const auto expect = m.jump(m.flow(p.xi, p.theta));
    EXPECT_EQ(next.xi, expect);
    EXPECT_GT(next.theta, 0.0);
    p = next;
  }
}

TEST(FlowObservable, IndicatorAndConstant) {
  const auto ind = FlowObservable::basin_indicator(1);
  EXPECT_NEAR(ind.integrate({0.25, 0.75}, {1.0, 0.0}, 0, 2.0), 1.0, 1e-12);
  EXPECT_EQ(ind.at({0.75, 0.75}, 0), 1.0);
  EXPECT_EQ(ind.at({0.25, 0.75}, 0), 0.0);
  const auto c = FlowObservable::constant(2.5);
  EXPECT_DOUBLE_EQ(c.integrate({0.1, 0.2}, {1.0, 1.0}, 0, 4.0), 10.0);
  const auto f = FlowObservable::function([](Vec2 x, int) { return x.x; }, 1e-4);
  EXPECT_NEAR(f.integrate({0.0, 0.0}, {1.0, 0.0}, 0, 0.5), 0.125, 1e-4);
  EXPECT_THROW(FlowObservable::function({}, 1.0), InvalidArgument);
}

TEST(DiscretizedChain, CachedStepMatchesPlainStep) {
  const LiftedMetropolisPdmp m(3.0);
  const DiscretizedChain chain(m, 0.01);
  const RngStream stream(40);
  auto z = lifted_state({0.3, 0.9}, 2);
  std::vector<LiftedState> path;
  chain.evolve(chain.spawn(z, stream), 50.0, chain.whole_space(), FlowObservable::constant(0.0),
               &path);
  ASSERT_EQ(path.size(), 5001u);
  for (std::uint64_t n = 0; n < 5000; ++n) {
    Rng rng = stream.at(n);
    z = chain.step(z, rng);
    ASSERT_EQ(z, path[n + 1]) << "step " << n;
  }
}

TEST(DiscretizedChain, AcceptanceAgreesWithFloatingPoint) {
  const LiftedMetropolisPdmp m(3.0);
  const DiscretizedChain chain(m, 0.01);
  for (int i = 0; i < 200; ++i) {
    const Vec2 x{std::fmod(i * 0.1234, 1.0), std::fmod(i * 0.5678, 1.0)};
    for (int k = 0; k < 4; ++k) {
      const auto z = lifted_state(x, k);
      EXPECT_NEAR(chain.acceptance(z), chain.acceptance(z.position(), k), 1e-12);
    }
  }
  EXPECT_THROW(DiscretizedChain(m, 0.0), InvalidArgument);
}

TEST(DiscretizedChain, InvarianceResidual) {
  const LiftedMetropolisPdmp m(3.0);
  const DiscretizedChain chain(m, 0.01);
  for (int i = 0; i < 200; ++i) {
    const Vec2 x{std::fmod(i * 0.311, 1.0), std::fmod(i * 0.173, 1.0)};
    for (int k = 0; k < 4; ++k) {
      const Vec2 y = x + 0.01 * m.direction(k);
      const double scale = std::max(std::exp(-3.0 * m.potential()(x)), std::exp(-3.0 * m.potential()(y)));
      EXPECT_LT(std::abs(discrete_invariance_residual(chain, x, k)) / scale, 1e-12);
    }
  }
}

TEST(DiscretizedChain, EvolveAccumulatesLeftEndpoint) {
  const LiftedMetropolisPdmp m(3.0);
  const DiscretizedChain chain(m, 0.01);
  const auto seg = chain.evolve(chain.spawn(lifted_state({0.75, 0.75}, 0), RngStream(41)), 1.0,
                                chain.whole_space(), FlowObservable::constant(1.0));
  EXPECT_EQ(seg.native_steps, 100u);
  EXPECT_NEAR(seg.accumulated, 1.0, 1e-12);
  EXPECT_NEAR(seg.physical_time, 1.0, 1e-12);
}
