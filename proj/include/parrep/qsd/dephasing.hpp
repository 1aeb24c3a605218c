#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <queue>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "parrep/errors.hpp"
#include "parrep/log.hpp"
#include "parrep/process/types.hpp"

namespace parrep {

enum class DephasingMethod { rejection, fleming_viot };

std::string_view to_string(DephasingMethod m) noexcept;
DephasingMethod parse_dephasing_method(std::string_view s);

struct DephasingConfig {
  DephasingMethod method = DephasingMethod::fleming_viot;
  double t_corr = 1.0;
  int replicas = 1;
  std::uint64_t max_restarts = 1'000'000;
  /// Fleming-Viot only: per-copy independent rejection tail of this length.
  double rejection_tail = 0.0;
};

struct Branching {
  double time = 0.0;
  int copy = 0;   // 1-based
  int donor = 0;  // 1-based
};

template <class S>
struct QsdSampleSet {
  std::vector<S> samples;
  DephasingMethod method_used = DephasingMethod::rejection;
  std::vector<std::uint64_t> restarts;  // per replica
  std::vector<Branching> branchings;
  std::uint64_t parallel_steps = 0;  // native steps on the slowest replica
  std::uint64_t native_steps = 0;    // all steps, every copy
};

namespace detail {

inline constexpr std::uint64_t kAlive = ~std::uint64_t{0};

inline std::uint64_t native_count(double t, double native) {
  return static_cast<std::uint64_t>(std::llround(t / native));
}

}  // namespace detail

/// Each replica restarts from a uniformly chosen seed until one path stays
/// in `w` for t_corr; the terminal states are the samples.
template <PathProcess P>
QsdSampleSet<typename P::State> rejection_dephase(const P& process, const typename P::Region& w,
                                                  std::span<const typename P::State> seeds,
                                                  const DephasingConfig& cfg, RngStream stream) {
  if (seeds.empty()) throw InvalidArgument("rejection_dephase: no restart seeds");
  if (cfg.replicas < 1) throw InvalidArgument("rejection_dephase: need at least one replica");
  if (!(cfg.t_corr >= 0.0)) throw InvalidArgument("rejection_dephase: t_corr must be nonnegative");
  for (const auto& s : seeds) {
    if (!process.contains(w, s)) throw InvalidArgument("rejection_dephase: seed outside the region");
  }
  const double native = process.native_step();
  const std::uint64_t steps = detail::native_count(cfg.t_corr, native);
  QsdSampleSet<typename P::State> out;
  out.method_used = DephasingMethod::rejection;
  out.restarts.assign(static_cast<std::size_t>(cfg.replicas), 0);
  const ZeroObservable zero;
  for (int r = 1; r <= cfg.replicas; ++r) {
    const RngStream rs = stream.derive(static_cast<std::uint64_t>(r));
    const RngStream pick = rs.derive(Purpose::restart);
    std::uint64_t used = 0;
    for (std::uint64_t attempt = 0;; ++attempt) {
      if (attempt > cfg.max_restarts) {
        throw DephasingFailed("rejection_dephase: replica " + std::to_string(r) +
                              " exceeded " + std::to_string(cfg.max_restarts) +
                              " restarts in region '" + std::string(region_label(w)) + "'");
      }
      Rng rng = pick.at(attempt);
      const auto& seed = seeds[static_cast<std::size_t>(rng.below(seeds.size()))];
      if (steps == 0) {
        out.samples.push_back(seed);
        break;
      }
      auto seg = process.evolve(process.spawn(seed, rs.derive(attempt)),
                                static_cast<double>(steps) * native, w, zero);
      used += seg.native_steps;
      if (!seg.escaped) {
        out.samples.push_back(process.state(seg.end));
        break;
      }
      ++out.restarts[static_cast<std::size_t>(r - 1)];
    }
    out.native_steps += used;
    out.parallel_steps = std::max(out.parallel_steps, used);
  }
  return out;
}

/// Fleming-Viot dephasing: R copies evolve in `w` for t_corr; a copy that
/// leaves is restarted at the current position of a uniformly chosen copy
/// still inside. Copies start from uniformly chosen seeds. The event loop is
/// sequential in virtual time; simultaneous escapes are handled in replica
/// order, and copies already relocated at that instant count as alive.
template <PathProcess P>
QsdSampleSet<typename P::State> fleming_viot_dephase(const P& process,
                                                     const typename P::Region& w,
                                                     std::span<const typename P::State> seeds,
                                                     const DephasingConfig& cfg,
                                                     RngStream stream) {
  using State = typename P::State;
  if (seeds.empty()) throw InvalidArgument("fleming_viot_dephase: no seeds");
  if (cfg.replicas < 2) throw InvalidArgument("fleming_viot_dephase: need at least two copies");
  if (!(cfg.t_corr >= 0.0)) throw InvalidArgument("fleming_viot_dephase: t_corr must be nonnegative");
  for (const auto& s : seeds) {
    if (!process.contains(w, s)) throw InvalidArgument("fleming_viot_dephase: seed outside the region");
  }
  const double native = process.native_step();
  const std::uint64_t total = detail::native_count(cfg.t_corr, native);
  const auto R = static_cast<std::size_t>(cfg.replicas);
  const ZeroObservable zero;
  constexpr std::uint64_t kAlive = detail::kAlive;

  struct Copy {
    typename P::Particle start;  // particle at the beginning of its current life
    std::uint64_t born = 0;      // native step of that beginning
    std::uint64_t death = detail::kAlive;
    State exit{};
    typename P::Particle end;  // particle at `total` if it survives
    std::uint64_t generation = 0;
  };

  QsdSampleSet<State> out;
  out.method_used = DephasingMethod::fleming_viot;
  out.restarts.assign(R, 0);
  const RngStream seed_pick = stream.derive(Purpose::restart);
  const RngStream branch = stream.derive(Purpose::branch);

  auto live = [&](Copy& c) {
    const std::uint64_t left = total - c.born;
    if (left == 0) {
      c.death = kAlive;
      c.end = c.start;
      return;
    }
    auto seg = process.evolve(c.start, static_cast<double>(left) * native, w, zero);
    out.native_steps += seg.native_steps;
    if (seg.escaped) {
      c.death = c.born + detail::native_count(seg.elapsed, native);
      c.exit = process.state(seg.end);
    } else {
      c.death = kAlive;
      c.end = std::move(seg.end);
    }
  };

  std::vector<Copy> copies(R);
  using Event = std::pair<std::uint64_t, std::size_t>;  // (death step, copy index)
  std::priority_queue<Event, std::vector<Event>, std::greater<>> events;
  for (std::size_t i = 0; i < R; ++i) {
    Rng rng = seed_pick.at(i);
    const State& s = seeds[static_cast<std::size_t>(rng.below(seeds.size()))];
    copies[i].start = process.spawn(s, stream.derive(i + 1).derive(std::uint64_t{0}));
    live(copies[i]);
    if (copies[i].death != kAlive) events.push({copies[i].death, i});
  }

  std::uint64_t branch_count = 0;
  std::vector<std::size_t> alive;
  alive.reserve(R);
  while (!events.empty()) {
    const auto [t, i] = events.top();
    events.pop();
    if (copies[i].death != t) continue;  // stale
    alive.clear();
    for (std::size_t j = 0; j < R; ++j) {
      if (j != i && copies[j].death > t) alive.push_back(j);
    }
    if (alive.empty()) {
      throw AllCopiesEscaped("fleming_viot_dephase: every copy left region '" +
                             std::string(region_label(w)) + "' by step " + std::to_string(t));
    }
    Rng rng = branch.at(branch_count++);
    const std::size_t donor = alive[static_cast<std::size_t>(rng.below(alive.size()))];
    // The donor's position at t, by replaying its current life.
    const Copy& d = copies[donor];
    State here = process.state(d.start);
    if (t > d.born) {
      auto seg = process.evolve(d.start, static_cast<double>(t - d.born) * native, w, zero);
      out.native_steps += seg.native_steps;
      here = process.state(seg.end);
    }
    Copy& c = copies[i];
    ++c.generation;
    ++out.restarts[i];
    out.branchings.push_back({static_cast<double>(t) * native, static_cast<int>(i + 1),
                              static_cast<int>(donor + 1)});
    c.born = t;
    c.start = process.spawn(here, stream.derive(i + 1).derive(c.generation));
    live(c);
    if (c.death != kAlive) events.push({c.death, i});
  }

  out.parallel_steps = total;
  out.samples.reserve(R);
  for (auto& c : copies) out.samples.push_back(process.state(c.end));

  if (cfg.rejection_tail > 0.0) {
    DephasingConfig tail = cfg;
    tail.method = DephasingMethod::rejection;
    tail.t_corr = cfg.rejection_tail;
    tail.replicas = 1;
    const RngStream ts = stream.derive(Purpose::dephase);
    std::uint64_t slowest = 0;
    for (std::size_t i = 0; i < R; ++i) {
      auto one = rejection_dephase(process, w, std::span<const State>(&out.samples[i], 1), tail,
                                   ts.derive(i + 1));
      out.samples[i] = one.samples.front();
      out.restarts[i] += one.restarts.front();
      out.native_steps += one.native_steps;
      slowest = std::max(slowest, one.parallel_steps);
    }
    out.parallel_steps += slowest;
  }
  return out;
}

/// Dispatches on the configured method; with a single replica Fleming-Viot
/// has no donors and rejection is used instead. If every Fleming-Viot copy
/// escapes at once, the step is redone by rejection; the aborted attempt is
/// charged its full horizon of parallel steps.
template <PathProcess P>
QsdSampleSet<typename P::State> dephase(const P& process, const typename P::Region& w,
                                        std::span<const typename P::State> seeds,
                                        const DephasingConfig& cfg, RngStream stream) {
  if (cfg.method == DephasingMethod::fleming_viot && cfg.replicas >= 2) {
    try {
      return fleming_viot_dephase(process, w, seeds, cfg, stream);
    } catch (const AllCopiesEscaped& e) {
      log::warn(std::string(e.what()) + "; redoing this step by rejection");
    }
    auto out = rejection_dephase(process, w, seeds, cfg, stream.derive(Purpose::restart).derive(1));
    out.parallel_steps += detail::native_count(cfg.t_corr, process.native_step());
    return out;
  }
  return rejection_dephase(process, w, seeds, cfg, stream);
}

}  // namespace parrep
