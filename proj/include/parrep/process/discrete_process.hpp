#pragma once

#include <cmath>
#include <cstdint>
#include <utility>
#include <vector>

#include "parrep/errors.hpp"
#include "parrep/process/types.hpp"

namespace parrep {

template <class M>
concept DiscreteModel = requires(const M& m, const typename M::State& s, Rng& rng) {
  typename M::State;
  { m.step(s, rng) } -> std::convertible_to<typename M::State>;
};

/// Adapts a discrete-time step rule into a PathProcess. Step n of a particle
/// draws from `stream.at(n)`.
///
/// A model may optionally expose `holding_time(state)`; it is then used as
/// the physical duration of each step (a PDMP skeleton chain), otherwise
/// each step lasts one time unit.
template <DiscreteModel Model>
class DiscreteProcess {
 public:
  using State = typename Model::State;
  struct Particle {
    State x{};
    RngStream stream{};
    std::uint64_t clock = 0;
  };
  using Region = parrep::Region<State>;
  using Path = std::vector<State>;
  static constexpr TimeAxis time_axis = TimeAxis::discrete;

  DiscreteProcess() = default;
  explicit DiscreteProcess(Model model) : model_(std::move(model)) {}

  const Model& model() const noexcept { return model_; }

  Particle spawn(const State& s, RngStream stream) const { return {s, stream, 0}; }
  const State& state(const Particle& z) const noexcept { return z.x; }
  bool contains(const Region& w, const State& s) const { return w.contains(s); }
  double native_step() const noexcept { return 1.0; }
  Region whole_space() const { return parrep::whole_space<State>(); }

  double holding_time(const State& s) const {
    if constexpr (requires { model_.holding_time(s); }) {
      return model_.holding_time(s);
    } else {
      return 1.0;
    }
  }

  /// Evolves for `duration` steps or until the first state outside `w`.
  /// `g` is summed over X(0), ..., X(T ^ duration - 1).
  template <class G>
  Segment<Particle> evolve(Particle z, double duration, const Region& w, const G& g,
                           Path* path = nullptr) const {
    const auto steps = static_cast<std::uint64_t>(std::llround(duration));
    Segment<Particle> seg{std::move(z)};
    if (path) {
      path->clear();
      path->push_back(seg.end.x);
    }
    for (std::uint64_t i = 0; i < steps; ++i) {
      seg.accumulated += g(seg.end.x);
      seg.physical_time += holding_time(seg.end.x);
      Rng rng = seg.end.stream.at(seg.end.clock);
      seg.end.x = model_.step(seg.end.x, rng);
      ++seg.end.clock;
      ++seg.native_steps;
      if (path) path->push_back(seg.end.x);
      if (!w.contains(seg.end.x)) {
        seg.escaped = true;
        seg.elapsed = static_cast<double>(i + 1);
        return seg;
      }
    }
    seg.elapsed = static_cast<double>(steps);
    return seg;
  }

 private:
  Model model_{};
};

/// Simple symmetric random walk on the integers.
struct SimpleRandomWalk {
  using State = std::int64_t;

  State step(State x, Rng& rng) const noexcept { return (rng() >> 63) ? x + 1 : x - 1; }
};

using RandomWalkProcess = DiscreteProcess<SimpleRandomWalk>;

/// {lo, ..., hi} as a region of the integer lattice.
inline Region<std::int64_t> integer_interval(std::int64_t lo, std::int64_t hi) {
  return {"[" + std::to_string(lo) + "," + std::to_string(hi) + "]",
          [lo, hi](const std::int64_t& x) { return x >= lo && x <= hi; }};
}

}  // namespace parrep
