#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

namespace parrep::pdmp {

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  friend constexpr Vec2 operator+(Vec2 a, Vec2 b) noexcept { return {a.x + b.x, a.y + b.y}; }
  friend constexpr Vec2 operator-(Vec2 a, Vec2 b) noexcept { return {a.x - b.x, a.y - b.y}; }
  friend constexpr Vec2 operator*(double s, Vec2 a) noexcept { return {s * a.x, s * a.y}; }
  friend constexpr bool operator==(Vec2, Vec2) = default;
  Vec2& operator+=(Vec2 b) noexcept {
    x += b.x;
    y += b.y;
    return *this;
  }
};

constexpr double dot(Vec2 a, Vec2 b) noexcept { return a.x * b.x + a.y * b.y; }
inline double norm(Vec2 a) noexcept { return std::hypot(a.x, a.y); }

/// x - floor(x), kept strictly below 1.
double wrap(double x) noexcept;

/// Position on the unit circle as a 64-bit fraction of a turn. Adding a
/// whole period is the identity, exactly.
std::uint64_t to_turns(double x) noexcept;
double from_turns(std::uint64_t u) noexcept;
/// u + d (mod 1) with d an arbitrary real displacement.
std::uint64_t advance_turns(std::uint64_t u, double d) noexcept;

/// Point of the periodic unit square [0,1)^2.
struct TorusPoint {
  std::uint64_t x = 0;
  std::uint64_t y = 0;

  static TorusPoint from(Vec2 p) noexcept { return {to_turns(p.x), to_turns(p.y)}; }
  Vec2 to_vec() const noexcept { return {from_turns(x), from_turns(y)}; }
  [[nodiscard]] TorusPoint advanced(Vec2 d) const noexcept {
    return {advance_turns(x, d.x), advance_turns(y, d.y)};
  }
  friend constexpr bool operator==(TorusPoint, TorusPoint) = default;
};

/// Half-open periodic box [x0, x0 + wx) x [y0, y0 + wy) on the unit torus.
class Box {
 public:
  Box() = default;
  Box(Vec2 lower, Vec2 width);

  bool contains(TorusPoint p) const noexcept {
    return (full_x_ || p.x - ax_ < wx_) && (full_y_ || p.y - ay_ < wy_);
  }
  bool contains(Vec2 p) const noexcept { return contains(TorusPoint::from(p)); }

  Vec2 lower() const noexcept { return lower_; }
  Vec2 width() const noexcept { return width_; }

  struct Hit {
    double time;
    TorusPoint point;  // first lattice point outside the box along the ray
  };

  /// First exit along p + t v, t in [0, max_t], for p inside the box.
  std::optional<Hit> first_exit(TorusPoint p, Vec2 v, double max_t) const noexcept;

  /// Lebesgue measure of {t in [0, len] : start + t v in box}.
  double time_inside(Vec2 start, Vec2 v, double len) const noexcept;

 private:
  Vec2 lower_{};
  Vec2 width_{1.0, 1.0};
  std::uint64_t ax_ = 0, ay_ = 0, wx_ = 0, wy_ = 0;
  bool full_x_ = true, full_y_ = true;
};

/// Labelled box used as a metastable set.
struct BoxRegion {
  int label = 0;
  Box box{};
};

std::string region_label(const BoxRegion& r);

/// The four quarter squares of [0,1)^2, numbered by depth of the default
/// potential: 1 = [1/2,1)^2, 2 = [0,1/2)x[1/2,1), 3 = [1/2,1)x[0,1/2),
/// 4 = [0,1/2)^2.
BoxRegion quarter_basin(int label);

/// Label in {1,2,3,4} of the quarter square containing the wrapped point.
int basin_label(Vec2 x) noexcept;
int basin_label(TorusPoint p) noexcept;

}  // namespace parrep::pdmp
