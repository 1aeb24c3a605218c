#include "parrep/pdmp/geometry.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <limits>
#include <vector>

#include "parrep/errors.hpp"

namespace parrep::pdmp {
namespace {

constexpr double kTwo64 = 0x1.0p64;
constexpr double kTwoMinus64 = 0x1.0p-64;

// Intervals of t in [0, len] where frac(c0 + v t) lies in [a, a + w).
void axis_intervals(double c0, double v, double len, double a, double w,
                    std::vector<std::array<double, 2>>& out) {
  out.clear();
  if (w >= 1.0) {
    out.push_back({0.0, len});
    return;
  }
  if (v == 0.0) {
    const double f = wrap(c0 - a);
    if (f < w) out.push_back({0.0, len});
    return;
  }
  const double c1 = c0 + v * len;
  const double lo = std::min(c0, c1);
  const double hi = std::max(c0, c1);
  const auto j0 = static_cast<long long>(std::floor(lo - a)) - 1;
  const auto j1 = static_cast<long long>(std::floor(hi - a)) + 1;
  for (long long j = j0; j <= j1; ++j) {
    const double e0 = a + static_cast<double>(j);
    const double e1 = e0 + w;
    double t0 = (e0 - c0) / v;
    double t1 = (e1 - c0) / v;
    if (t0 > t1) std::swap(t0, t1);
    t0 = std::max(t0, 0.0);
    t1 = std::min(t1, len);
    if (t1 > t0) out.push_back({t0, t1});
  }
  std::sort(out.begin(), out.end());
}

}  // namespace

double wrap(double x) noexcept {
  const double r = x - std::floor(x);
  return r < 1.0 ? r : std::nextafter(1.0, 0.0);
}

std::uint64_t to_turns(double x) noexcept {
  const double r = x - std::floor(x);
  if (!(r < 1.0)) return std::numeric_limits<std::uint64_t>::max();
  return static_cast<std::uint64_t>(r * kTwo64);
}

double from_turns(std::uint64_t u) noexcept {
  return static_cast<double>(u >> 11) * 0x1.0p-53;
}

std::uint64_t advance_turns(std::uint64_t u, double d) noexcept {
  return d >= 0.0 ? u + to_turns(d) : u - to_turns(-d);
}

Box::Box(Vec2 lower, Vec2 width) : lower_{wrap(lower.x), wrap(lower.y)}, width_(width) {
  if (!(width.x > 0.0) || !(width.y > 0.0)) {
    throw InvalidArgument("Box: widths must be positive");
  }
  ax_ = to_turns(lower_.x);
  ay_ = to_turns(lower_.y);
  full_x_ = width.x >= 1.0;
  full_y_ = width.y >= 1.0;
  wx_ = full_x_ ? 0 : static_cast<std::uint64_t>(width.x * kTwo64);
  wy_ = full_y_ ? 0 : static_cast<std::uint64_t>(width.y * kTwo64);
}

std::optional<Box::Hit> Box::first_exit(TorusPoint p, Vec2 v, double max_t) const noexcept {
  double best = std::numeric_limits<double>::infinity();
  int axis = -1;
  std::uint64_t exit_coord = 0;
  auto consider = [&](std::uint64_t pc, std::uint64_t a, std::uint64_t w, bool full, double vel,
                      int which) {
    if (full || vel == 0.0) return;
    const std::uint64_t off = pc - a;
    if (vel > 0.0) {
      const double t = static_cast<double>(w - off) * kTwoMinus64 / vel;
      if (t < best) {
        best = t;
        axis = which;
        exit_coord = a + w;
      }
    } else {
      const double t = (static_cast<double>(off) + 1.0) * kTwoMinus64 / -vel;
      if (t < best) {
        best = t;
        axis = which;
        exit_coord = a - 1;
      }
    }
  };
  consider(p.x, ax_, wx_, full_x_, v.x, 0);
  consider(p.y, ay_, wy_, full_y_, v.y, 1);
  if (axis < 0 || best > max_t) return std::nullopt;
  TorusPoint q = p;
  if (axis == 0) {
    q.x = exit_coord;
    q.y = advance_turns(p.y, best * v.y);
  } else {
    q.y = exit_coord;
    q.x = advance_turns(p.x, best * v.x);
  }
  return Hit{best, q};
}

double Box::time_inside(Vec2 start, Vec2 v, double len) const noexcept {
  if (!(len > 0.0)) return 0.0;
  thread_local std::vector<std::array<double, 2>> ix, iy;
  axis_intervals(start.x, v.x, len, lower_.x, width_.x, ix);
  if (ix.empty()) return 0.0;
  axis_intervals(start.y, v.y, len, lower_.y, width_.y, iy);
  double total = 0.0;
  std::size_t i = 0, j = 0;
  while (i < ix.size() && j < iy.size()) {
    const double lo = std::max(ix[i][0], iy[j][0]);
    const double hi = std::min(ix[i][1], iy[j][1]);
    if (hi > lo) total += hi - lo;
    if (ix[i][1] < iy[j][1]) {
      ++i;
    } else {
      ++j;
    }
  }
  return total;
}

std::string region_label(const BoxRegion& r) { return "W" + std::to_string(r.label); }

BoxRegion quarter_basin(int label) {
  switch (label) {
    case 1:
      return {1, Box({0.5, 0.5}, {0.5, 0.5})};
    case 2:
      return {2, Box({0.0, 0.5}, {0.5, 0.5})};
    case 3:
      return {3, Box({0.5, 0.0}, {0.5, 0.5})};
    case 4:
      return {4, Box({0.0, 0.0}, {0.5, 0.5})};
    default:
      throw InvalidArgument("quarter_basin: label must be in 1..4");
  }
}

int basin_label(TorusPoint p) noexcept {
  const bool hx = (p.x >> 63) != 0;
  const bool hy = (p.y >> 63) != 0;
  if (hx && hy) return 1;
  if (!hx && hy) return 2;
  if (hx && !hy) return 3;
  return 4;
}

int basin_label(Vec2 x) noexcept { return basin_label(TorusPoint::from(x)); }

}  // namespace parrep::pdmp
