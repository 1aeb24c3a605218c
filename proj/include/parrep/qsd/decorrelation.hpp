#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>

#include "parrep/errors.hpp"
#include "parrep/process/types.hpp"

namespace parrep {

template <class S>
struct DecorrelationResult {
  double f_decorr = 0.0;
  double T_decorr = 0.0;       // physical time
  std::size_t region = 0;      // index into the region list
  S terminal{};
  std::uint64_t native_steps = 0;
};

/// Number of consecutive path points that certify a stay of length t_corr:
/// t_corr points for a chain (at least one), t_corr / dt + 1 grid points
/// for a continuous-time process, i.e. the closed window [S - t_corr, S].
template <PathProcess P>
std::uint64_t certification_points(const P& process, double t_corr) {
  const auto steps = static_cast<std::uint64_t>(std::llround(t_corr / process.native_step()));
  if constexpr (P::time_axis == TimeAxis::discrete) {
    return steps == 0 ? 1 : steps;
  } else {
    return steps + 1;
  }
}

/// Serial evolution from x0 until the path has stayed in one region for its
/// decorrelation time. f and the elapsed time are accumulated over every
/// point before the stopping point, including excursions outside all regions.
template <PathProcess P, class G, class TCorr>
DecorrelationResult<typename P::State> decorrelation_run(
    const P& process, std::span<const typename P::Region> regions, const typename P::State& x0,
    const G& g, const TCorr& t_corr_of, RngStream stream, double cap = 1e12) {
  if (regions.empty()) throw InvalidArgument("decorrelation_run: no regions");
  const double native = process.native_step();
  auto locate = [&](const typename P::State& s) -> std::optional<std::size_t> {
    for (std::size_t i = 0; i < regions.size(); ++i) {
      if (process.contains(regions[i], s)) return i;
    }
    return std::nullopt;
  };

  DecorrelationResult<typename P::State> out;
  auto z = process.spawn(x0, stream);
  const auto everywhere = process.whole_space();
  double elapsed = 0.0;
  while (elapsed < cap) {
    const auto here = locate(process.state(z));
    if (!here) {
      auto seg = process.evolve(std::move(z), native, everywhere, g);
      out.f_decorr += seg.accumulated;
      out.T_decorr += seg.physical_time;
      out.native_steps += seg.native_steps;
      elapsed += seg.elapsed;
      z = std::move(seg.end);
      continue;
    }
    const auto& w = regions[*here];
    const std::uint64_t need = certification_points(process, t_corr_of(w));
    if (need > 1) {
      auto seg = process.evolve(std::move(z), static_cast<double>(need - 1) * native, w, g);
      out.f_decorr += seg.accumulated;
      out.T_decorr += seg.physical_time;
      out.native_steps += seg.native_steps;
      elapsed += seg.elapsed;
      z = std::move(seg.end);
      if (seg.escaped) continue;
    }
    out.region = *here;
    out.terminal = process.state(z);
    return out;
  }
  throw CapExceeded("decorrelation_run: no region certified before cap");
}

}  // namespace parrep
