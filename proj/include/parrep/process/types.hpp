#pragma once

#include <concepts>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "parrep/process/rng.hpp"

namespace parrep {

enum class TimeAxis { discrete, continuous };

/// A membership-testable subset of state space.
template <class S>
struct Region {
  std::string label;
  std::function<bool(const S&)> contains;

  bool operator()(const S& s) const { return contains(s); }
};

template <class S>
std::string_view region_label(const Region<S>& r) noexcept {
  return r.label;
}

template <class S>
Region<S> whole_space(std::string label = "whole") {
  return {std::move(label), [](const S&) { return true; }};
}

/// First exit (T, X(T)) from a region.
template <class S>
struct EscapeEvent {
  double time = 0.0;
  S exit_state{};
};

/// Result of evolving one particle for a bounded duration inside a region.
/// `end` is the particle at the first exit, or at the end of the window.
template <class Particle>
struct Segment {
  Particle end;
  bool escaped = false;
  double elapsed = 0.0;        // native time axis: exit time or full duration
  double physical_time = 0.0;  // physical clock (sum of holding times on a skeleton chain)
  double accumulated = 0.0;    // observable sum / integral over the pre-exit path
  std::uint64_t native_steps = 0;
};

/// One ordered trajectory fragment X_k(t), 0 <= t <= t_k.
template <class S, class Path>
struct Fragment {
  std::uint64_t order_index = 0;
  int replica = 0;  // 1-based
  std::uint64_t segment = 0;
  double duration = 0.0;
  S start_state{};
  Path path{};
  bool escaped = false;
  double internal_exit_time = 0.0;  // valid iff escaped
  std::optional<S> exit_state;      // set iff escaped
  double accumulated = 0.0;
  double physical_time = 0.0;
  std::uint64_t native_steps = 0;
};

/// Observable that is zero everywhere; used when only times matter.
struct ZeroObservable {
  template <class T>
  constexpr double operator()(const T&) const noexcept {
    return 0.0;
  }
};

struct UnitObservable {
  template <class T>
  constexpr double operator()(const T&) const noexcept {
    return 1.0;
  }
};

/// The contract every simulated process satisfies. A particle is a state
/// bundled with its private random stream and step counter, so a path is a
/// pure function of (start state, stream) and can be cut into windows
/// arbitrarily without changing a single draw.
template <class P>
concept PathProcess = requires(const P& p, const typename P::Particle& z,
                               const typename P::State& s,
                               const typename P::Region& w, RngStream stream) {
  typename P::State;
  typename P::Particle;
  typename P::Region;
  typename P::Path;
  { P::time_axis } -> std::convertible_to<TimeAxis>;
  { p.spawn(s, stream) } -> std::same_as<typename P::Particle>;
  { p.state(z) } -> std::convertible_to<typename P::State>;
  { p.contains(w, s) } -> std::same_as<bool>;
  { p.native_step() } -> std::convertible_to<double>;
  { p.whole_space() } -> std::convertible_to<typename P::Region>;
};

/// Default step cap shared by serial evolutions (native steps).
inline constexpr std::uint64_t kDefaultStepCap = 1'000'000'000ULL;

}  // namespace parrep
