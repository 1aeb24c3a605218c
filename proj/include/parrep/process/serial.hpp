#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <string>

#include "parrep/errors.hpp"
#include "parrep/process/types.hpp"

namespace parrep {

template <class S>
struct SerialExit {
  EscapeEvent<S> event;
  double g_accum = 0.0;
  double physical_time = 0.0;
  std::uint64_t native_steps = 0;
};

/// Reference oracle: plain serial simulation from x0 until the first exit
/// from `w`. The cap is in native time units of the process.
template <PathProcess P, class G>
SerialExit<typename P::State> serial_first_exit(const P& process, const typename P::Region& w,
                                                const typename P::State& x0, const G& g,
                                                RngStream stream, double cap) {
  if (!process.contains(w, x0)) {
    throw InvalidArgument("serial_first_exit: start state is outside the region");
  }
  if (!(cap > 0.0)) throw InvalidArgument("serial_first_exit: cap must be positive");

  // Chunking does not change the path: draws are keyed by the step counter.
  const double chunk = std::max(process.native_step(), 1.0) * 65536.0;
  auto z = process.spawn(x0, stream);
  SerialExit<typename P::State> out;
  double t = 0.0;
  while (t < cap) {
    const double window = std::min(chunk, cap - t);
    auto seg = process.evolve(std::move(z), window, w, g);
    out.g_accum += seg.accumulated;
    out.physical_time += seg.physical_time;
    out.native_steps += seg.native_steps;
    if (seg.escaped) {
      out.event = {t + seg.elapsed, process.state(seg.end)};
      return out;
    }
    t += seg.elapsed;
    z = std::move(seg.end);
  }
  throw CapExceeded("serial_first_exit: no exit from region '" + std::string(region_label(w)) +
                    "' before cap " + std::to_string(cap));
}

/// Evolves one fragment body (the window [0, duration]) of a path started at x0.
template <PathProcess P, class G>
Fragment<typename P::State, typename P::Path> evolve_segment(const P& process,
                                                             const typename P::Region& w,
                                                             const typename P::State& x0,
                                                             double duration, const G& g,
                                                             RngStream stream,
                                                             bool record_path = true) {
  if (!(duration > 0.0)) throw InvalidArgument("evolve_segment: duration must be positive");
  Fragment<typename P::State, typename P::Path> f;
  f.duration = duration;
  f.start_state = x0;
  auto seg = process.evolve(process.spawn(x0, stream), duration, w, g,
                            record_path ? &f.path : nullptr);
  f.escaped = seg.escaped;
  f.accumulated = seg.accumulated;
  f.physical_time = seg.physical_time;
  f.native_steps = seg.native_steps;
  if (seg.escaped) {
    f.internal_exit_time = seg.elapsed;
    f.exit_state = process.state(seg.end);
  }
  return f;
}

/// Discrete accumulation over a stored path X(0..n): sum of g over the
/// first n states (the terminal state is not counted).
template <class S, class G>
double accumulate(std::span<const S> path, const G& g) {
  if (path.empty()) throw InvalidArgument("accumulate: empty path");
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < path.size(); ++i) sum += g(path[i]);
  return sum;
}

}  // namespace parrep
