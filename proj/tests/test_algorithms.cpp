#include <gtest/gtest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "parrep/algorithms/parrep.hpp"
#include "parrep/process/discrete_process.hpp"

using namespace parrep;
using namespace parrep::pdmp;

namespace {

std::vector<BoxRegion> basins() {
  return {quarter_basin(1), quarter_basin(2), quarter_basin(3), quarter_basin(4)};
}

ParRepConfig small_config(int R) {
  ParRepConfig c;
  c.replicas = R;
  c.t_corr = 2.0;
  c.window = 0.01;
  c.t_stop = 400.0;
  return c;
}

StationaryRun pdmp_run(const ParRepConfig& cfg, const FlowObservable& f, std::uint64_t seed) {
  const DiscretizedChain chain(LiftedMetropolisPdmp(3.0), 0.01);
  const auto regions = basins();
  return pdmp_stationary_average(chain, regions, cfg, f, lifted_state({0.3, 0.3}, 0), RngStream(seed));
}

StationaryRun skeleton_run(ParRepConfig cfg, const FlowObservable& f, std::uint64_t seed) {
  const LiftedMetropolisPdmp m(3.0);
  const SkeletonProcess process(m);
  const auto regions = basins();
  cfg.t_corr = 30.0;
  cfg.t_stop = 300.0;
  Rng rng = RngStream(seed).at(0);
  return skeleton_stationary_average(process, regions, cfg, f,
                                     skeleton_start(m, lifted_state({0.3, 0.3}, 0), rng), RngStream(seed));
}

}  // namespace

TEST(ParRepConfig, Validation) {
  ParRepConfig c;
  EXPECT_NO_THROW(c.validate());
  c.replicas = 0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.window = 0.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.t_corr_by_region[2] = -1.0;
  EXPECT_THROW(c.validate(), InvalidArgument);
  c = {};
  c.t_corr = 3.0;
  c.t_corr_by_region[2] = 7.0;
  EXPECT_EQ(c.t_corr_for(2), 7.0);
  EXPECT_EQ(c.t_corr_for(1), 3.0);
  EXPECT_EQ(parse_ordering("async"), Ordering::wallclock);
  EXPECT_EQ(parse_ordering("sync"), Ordering::synchronous);
  EXPECT_THROW(parse_ordering("x"), ConfigError);
}

TEST(Driver, UnitObservableTotalsAreExact) {
  for (auto ordering : {Ordering::synchronous, Ordering::wallclock}) {
    auto cfg = small_config(4);
    cfg.ordering = ordering;
    cfg.wallclock = {WallClockMode::iid_random, 1.0, {}};
    const auto run = pdmp_run(cfg, FlowObservable::constant(1.0), 3);
    EXPECT_EQ(run.estimate, 1.0);
    EXPECT_EQ(run.totals.f_sim, run.totals.T_sim);
    for (const auto& r : run.trace.records()) {
      EXPECT_EQ(r.f_decorr, r.T_decorr);
      EXPECT_EQ(r.f_par, r.T_par);
    }
    const auto sk = skeleton_run(cfg, FlowObservable::constant(1.0), 4);
    EXPECT_EQ(sk.estimate, 1.0);
    EXPECT_EQ(sk.totals.f_sim, sk.totals.T_sim);
  }
}

TEST(Driver, SingleReplicaHasUnitSpeedup) {
  const auto run = pdmp_run(small_config(1), FlowObservable::basin_indicator(1), 5);
  EXPECT_EQ(run.totals.speedup(), 1.0);
  const auto sk = skeleton_run(small_config(1), FlowObservable::basin_indicator(1), 6);
  EXPECT_EQ(sk.totals.speedup(), 1.0);
}

TEST(Driver, SerialStepAudit) {
  for (int R : {1, 4}) {
    const auto run = pdmp_run(small_config(R), FlowObservable::basin_indicator(1), 7);
    ASSERT_TRUE(run.trace.complete());
    EXPECT_EQ(recount_serial_steps(run.trace), run.totals.serial_steps);
    EXPECT_EQ(static_cast<std::uint64_t>(std::llround(run.totals.T_sim / 0.01)),
              run.totals.serial_steps);
    EXPECT_GE(run.totals.T_sim, 400.0);
    if (R > 1) {
      EXPECT_GT(run.totals.speedup(), 1.0);
    }
  }
}

TEST(Driver, Deterministic) {
  const auto a = pdmp_run(small_config(4), FlowObservable::basin_indicator(1), 8);
  const auto b = pdmp_run(small_config(4), FlowObservable::basin_indicator(1), 8);
  EXPECT_EQ(a.estimate, b.estimate);
  EXPECT_EQ(a.totals.serial_steps, b.totals.serial_steps);
  EXPECT_EQ(a.totals.parallel_units, b.totals.parallel_units);
}

TEST(Driver, EstimateIsAFraction) {
  const auto run = pdmp_run(small_config(4), FlowObservable::basin_indicator(1), 9);
  EXPECT_GT(run.estimate, 0.0);
  EXPECT_LT(run.estimate, 1.0);
  EXPECT_GE(run.totals.region_changes, 1u);
}

TEST(Driver, ToyProcessWithSharedSeeds) {
  const RandomWalkProcess p;
  const std::vector<Region<std::int64_t>> regions{integer_interval(-9, -1), integer_interval(0, 9)};
  const std::vector<std::vector<std::int64_t>> seeds{{-5}, {4, 5}};
  ParRepConfig cfg;
  cfg.replicas = 3;
  cfg.t_corr = 6.0;
  cfg.window = 1.0;
  cfg.t_stop = 5000.0;
  const auto label = [](const Region<std::int64_t>& w) { return w.label == "[-9,-1]" ? 1 : 2; };
  const auto run = stationary_average(p, std::span<const Region<std::int64_t>>(regions),
                                      std::span<const std::vector<std::int64_t>>(seeds), cfg,
                                      UnitObservable{}, label, std::int64_t{0}, RngStream(10));
  EXPECT_EQ(run.estimate, 1.0);
  EXPECT_EQ(recount_serial_steps(run.trace), run.totals.serial_steps);
  EXPECT_EQ(static_cast<double>(run.totals.serial_steps), run.totals.T_sim);
  const std::vector<std::vector<std::int64_t>> wrong{{-5}};
  EXPECT_THROW(stationary_average(p, std::span<const Region<std::int64_t>>(regions),
                                  std::span<const std::vector<std::int64_t>>(wrong), cfg,
                                  UnitObservable{}, label, std::int64_t{0}, RngStream(10)),
               InvalidArgument);
}

TEST(Trace, SpillsPastCap) {
  const auto path = std::filesystem::temp_directory_path() / "parrep_trace_spill.jsonl";
  std::filesystem::remove(path);
  Trace t(2, path.string());
  for (int i = 0; i < 5; ++i) {
    TraceRecord r;
    r.iteration = static_cast<std::uint64_t>(i);
    t.push(r);
  }
  EXPECT_EQ(t.records().size(), 2u);
  EXPECT_EQ(t.total(), 5u);
  EXPECT_EQ(t.spilled(), 3u);
  EXPECT_FALSE(t.complete());
  std::ifstream in(path);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    EXPECT_NE(line.find("\"iteration\""), std::string::npos);
    ++lines;
  }
  EXPECT_EQ(lines, 3);
  EXPECT_THROW(recount_serial_steps(t), Error);
  std::filesystem::remove(path);
}
