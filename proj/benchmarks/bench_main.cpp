#include <benchmark/benchmark.h>

#include <vector>

#include "parrep/algorithms/parrep.hpp"
#include "parrep/harness/quadrature.hpp"
#include "parrep/pdmp/lifted_pdmp.hpp"
#include "parrep/qsd/dephasing.hpp"

using namespace parrep;
using namespace parrep::pdmp;

namespace {

void BM_DiscretizedStep(benchmark::State& state) {
  const DiscretizedChain chain(LiftedMetropolisPdmp(3.0), 0.01);
  LiftedState z = lifted_state({0.3, 0.3}, 0);
  const RngStream s(1);
  std::uint64_t i = 0;
  for (auto _ : state) {
    Rng rng = s.at(i++);
    z = discretized_step(chain, z, rng);
    benchmark::DoNotOptimize(z);
  }
}
BENCHMARK(BM_DiscretizedStep);

void BM_DiscretizedEvolve(benchmark::State& state) {
  const DiscretizedChain chain(LiftedMetropolisPdmp(3.0), 0.01);
  const auto w = chain.whole_space();
  const auto f = FlowObservable::constant(1.0);
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto seg = chain.evolve(chain.spawn(lifted_state({0.3, 0.3}, 0), RngStream(seed++)), 10.0, w, f);
    benchmark::DoNotOptimize(seg.accumulated);
  }
  state.SetItemsProcessed(state.iterations() * 1000);
}
BENCHMARK(BM_DiscretizedEvolve);

void BM_HoldingTime(benchmark::State& state) {
  const LiftedMetropolisPdmp m(state.range(0));
  const LiftedState z = lifted_state({0.3, 0.3}, 0);
  const RngStream s(2);
  std::uint64_t i = 0;
  for (auto _ : state) {
    Rng rng = s.at(i++);
    benchmark::DoNotOptimize(sample_holding_time(m, z, rng));
  }
}
BENCHMARK(BM_HoldingTime)->Arg(1)->Arg(3);

void BM_SkeletonStep(benchmark::State& state) {
  const LiftedMetropolisPdmp m(3.0);
  const RngStream s(3);
  Rng r0 = s.at(0);
  SkeletonPoint p = skeleton_start(m, lifted_state({0.3, 0.3}, 0), r0);
  std::uint64_t i = 1;
  for (auto _ : state) {
    Rng rng = s.at(i++);
    p = skeleton_step(m, p, rng);
    benchmark::DoNotOptimize(p);
  }
}
BENCHMARK(BM_SkeletonStep);

void BM_FlemingViotDephase(benchmark::State& state) {
  const DiscretizedChain chain(LiftedMetropolisPdmp(3.0), 0.01);
  const auto w = quarter_basin(1);
  const auto seeds = anchor_states(chain.model(), w.box);
  DephasingConfig cfg;
  cfg.replicas = static_cast<int>(state.range(0));
  cfg.t_corr = 6.0;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto q = fleming_viot_dephase(chain, w, std::span<const LiftedState>(seeds), cfg, RngStream(seed++));
    benchmark::DoNotOptimize(q);
  }
}
BENCHMARK(BM_FlemingViotDephase)->Arg(2)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_PdmpParallelStep(benchmark::State& state) {
  const DiscretizedChain chain(LiftedMetropolisPdmp(3.0), 0.01);
  const auto w = quarter_basin(1);
  const auto f = FlowObservable::basin_indicator(1);
  ParRepConfig cfg;
  cfg.replicas = static_cast<int>(state.range(0));
  cfg.t_corr = 6.0;
  cfg.window = 0.01;
  const std::vector<LiftedState> starts(static_cast<std::size_t>(cfg.replicas),
                                        lifted_state(argmin_in(chain.model().potential(), w.box), 0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    auto out = pdmp_sync_parallel_step(chain, w, starts, cfg, f, RngStream(seed++));
    benchmark::DoNotOptimize(out);
  }
}
BENCHMARK(BM_PdmpParallelStep)->Arg(1)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_Quadrature(benchmark::State& state) {
  const PeriodicPotential v;
  const auto w = quarter_basin(1).box;
  for (auto _ : state) {
    benchmark::DoNotOptimize(quadrature_reference(v, 3.0, w, static_cast<int>(state.range(0))));
  }
}
BENCHMARK(BM_Quadrature)->Arg(16)->Arg(64)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
