#pragma once

#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include "parrep/errors.hpp"
#include "parrep/pdmp/geometry.hpp"
#include "parrep/process/types.hpp"

namespace parrep::pdmp {

/// V(x, y) = a (cos 4 pi x + cos 4 pi y) + b (sin 2 pi x + sin 2 pi y).
/// Defaults give the four-well landscape used throughout the harness.
struct PeriodicPotential {
  double cos4 = 1.0;
  double sin2 = 0.2;

  /// One-dimensional term u with V(x, y) = u(x) + u(y).
  double axis(double x) const noexcept {
    const double s = std::sin(2.0 * std::numbers::pi * x);
    return cos4 * (1.0 - 2.0 * s * s) + sin2 * s;
  }
  double axis_derivative(double x) const noexcept {
    constexpr double tau = 2.0 * std::numbers::pi;
    return -2.0 * tau * cos4 * std::sin(2.0 * tau * x) + tau * sin2 * std::cos(tau * x);
  }
  double operator()(Vec2 p) const noexcept { return axis(p.x) + axis(p.y); }
  Vec2 gradient(Vec2 p) const noexcept { return {axis_derivative(p.x), axis_derivative(p.y)}; }

  /// Upper bound on |dV/dx| and |dV/dy|.
  double derivative_bound() const noexcept {
    return 4.0 * std::numbers::pi * std::abs(cos4) + 2.0 * std::numbers::pi * std::abs(sin2);
  }
  /// Global minimum of V, located numerically.
  double minimum() const;
  bool is_constant() const noexcept { return cos4 == 0.0 && sin2 == 0.0; }
};

/// (x, k): position on the torus and index of the current direction.
struct LiftedState {
  TorusPoint x{};
  int k = 0;

  Vec2 position() const noexcept { return x.to_vec(); }
  friend constexpr bool operator==(const LiftedState&, const LiftedState&) = default;
};

inline LiftedState lifted_state(Vec2 x, int k) { return {TorusPoint::from(x), k}; }

/// Lifted Metropolis PDMP on the periodic unit square. Moves at velocity
/// d_k and switches k -> k-1 (mod N) at rate
/// lambda(x, k) = max_l beta (d_k + ... + d_{k+l}) . grad V(x).
class LiftedMetropolisPdmp {
 public:
  using State = LiftedState;

  explicit LiftedMetropolisPdmp(double beta, PeriodicPotential potential = {},
                                std::vector<Vec2> directions = default_directions());

  static std::vector<Vec2> default_directions();

  double beta() const noexcept { return beta_; }
  const PeriodicPotential& potential() const noexcept { return potential_; }
  int direction_count() const noexcept { return static_cast<int>(dirs_.size()); }
  Vec2 direction(int k) const noexcept { return dirs_[static_cast<std::size_t>(k)]; }
  /// d_k + ... + d_{k+l} with indices mod N.
  Vec2 partial_sum(int k, int l) const noexcept {
    return partial_[static_cast<std::size_t>(k * direction_count() + l)];
  }
  int previous(int k) const noexcept { return k == 0 ? direction_count() - 1 : k - 1; }
  int next(int k) const noexcept { return k + 1 == direction_count() ? 0 : k + 1; }

  /// F_{k,l}(x) = beta (d_k + ... + d_{k+l}) . grad V(x).
  double F(Vec2 x, int k, int l) const noexcept {
    return beta_ * dot(partial_sum(k, l), potential_.gradient(x));
  }
  double switching_rate(Vec2 x, int k) const noexcept;
  double switching_rate(const State& z) const noexcept {
    return switching_rate(z.position(), z.k);
  }
  /// Constant dominating the switching rate everywhere.
  double rate_bound() const noexcept { return bound_; }

  State flow(const State& z, double t) const noexcept {
    return {z.x.advanced(t * direction(z.k)), z.k};
  }
  State jump(const State& z) const noexcept { return {z.x, previous(z.k)}; }
  double rate_along(const State& z, double s) const noexcept {
    return switching_rate(flow(z, s));
  }

 private:
  double beta_;
  PeriodicPotential potential_;
  std::vector<Vec2> dirs_;
  std::vector<Vec2> partial_;
  double bound_ = 0.0;
};

/// Lowest point of V in the box, found per axis since V is separable.
Vec2 argmin_in(const PeriodicPotential& v, const Box& box);

/// Default restart seeds for a region: its lowest point, once per direction.
std::vector<LiftedState> anchor_states(const LiftedMetropolisPdmp& model, const Box& box);

/// A jump process whose rate along the flow can be evaluated and bounded.
template <class S>
concept ThinnableProcess = requires(const S& s, const typename S::State& z, double t) {
  { s.rate_along(z, t) } -> std::convertible_to<double>;
  { s.rate_bound() } -> std::convertible_to<double>;
};

/// Holding time with survival function exp(-int_0^r lambda(psi(s, z)) ds),
/// drawn by Poisson thinning against the constant bound. Throws
/// BoundViolated if a proposal exposes a rate above the bound, and
/// CapExceeded if no jump occurs before `cap`.
template <ThinnableProcess S>
double sample_holding_time(const S& proc, const typename S::State& z, Rng& rng,
                           double cap = 1e6) {
  const double bound = proc.rate_bound();
  if (!(bound > 0.0)) {
    throw CapExceeded("sample_holding_time: zero rate bound, the process never jumps");
  }
  double t = 0.0;
  for (;;) {
    t += rng.exponential(bound);
    if (t > cap) throw CapExceeded("sample_holding_time: no jump before cap");
    const double rate = proc.rate_along(z, t);
    if (rate > bound * (1.0 + 1e-12)) {
      throw BoundViolated("sample_holding_time: rate " + std::to_string(rate) +
                          " exceeds bound " + std::to_string(bound));
    }
    if (rng.uniform() * bound < rate) return t;
  }
}

/// Post-jump state and holding time of the skeleton chain.
struct SkeletonPoint {
  LiftedState xi{};
  double theta = 0.0;

  friend bool operator==(const SkeletonPoint&, const SkeletonPoint&) = default;
};

/// (xi_0, theta_0) with theta_0 drawn from the holding-time law.
SkeletonPoint skeleton_start(const LiftedMetropolisPdmp& model, const LiftedState& xi, Rng& rng);

/// Flows for theta, jumps, and draws the next holding time.
SkeletonPoint skeleton_step(const LiftedMetropolisPdmp& model, const SkeletonPoint& current,
                            Rng& rng);

/// Observable f(x, k) that can be integrated along a straight flow line.
/// Constants and box indicators integrate exactly; general functions use a
/// left-endpoint rule at resolution `h`.
class FlowObservable {
 public:
  using Function = std::function<double(Vec2, int)>;

  static FlowObservable constant(double c);
  static FlowObservable indicator(Box box);
  static FlowObservable basin_indicator(int label) { return indicator(quarter_basin(label).box); }
  static FlowObservable function(Function f, double h);

  double at(Vec2 x, int k) const;
  double operator()(const LiftedState& z) const { return at(z.position(), z.k); }
  /// int_0^len f(x + t v, k) dt.
  double integrate(Vec2 x, Vec2 v, int k, double len) const;

 private:
  enum class Kind { constant, indicator, function };
  Kind kind_ = Kind::constant;
  double c_ = 0.0;
  Box box_{};
  Function f_{};
  double h_ = 0.0;
};

/// Skeleton observable: the integral of f over the holding interval of a point.
struct SkeletonIntegral {
  const LiftedMetropolisPdmp* model;
  FlowObservable f;

  double operator()(const SkeletonPoint& p) const {
    return f.integrate(p.xi.position(), model->direction(p.xi.k), p.xi.k, p.theta);
  }
};

/// The skeleton chain as a discrete-time process. Membership in a region is
/// decided by the position of xi alone; each step lasts theta physically.
class SkeletonProcess {
 public:
  using State = SkeletonPoint;
  struct Particle {
    State x{};
    RngStream stream{};
    std::uint64_t clock = 0;
  };
  using Region = BoxRegion;
  using Path = std::vector<State>;
  static constexpr TimeAxis time_axis = TimeAxis::discrete;

  explicit SkeletonProcess(LiftedMetropolisPdmp model) : model_(std::move(model)) {}

  const LiftedMetropolisPdmp& model() const noexcept { return model_; }
  Particle spawn(const State& s, RngStream stream) const { return {s, stream, 0}; }
  const State& state(const Particle& z) const noexcept { return z.x; }
  bool contains(const Region& w, const State& s) const noexcept { return w.box.contains(s.xi.x); }
  double native_step() const noexcept { return 1.0; }
  Region whole_space() const { return {0, Box{}}; }
  SkeletonIntegral integral(FlowObservable f) const { return {&model_, std::move(f)}; }

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
      seg.physical_time += seg.end.x.theta;
      Rng rng = seg.end.stream.at(seg.end.clock);
      seg.end.x = skeleton_step(model_, seg.end.x, rng);
      ++seg.end.clock;
      ++seg.native_steps;
      if (path) path->push_back(seg.end.x);
      if (!contains(w, seg.end.x)) {
        seg.escaped = true;
        seg.elapsed = static_cast<double>(i + 1);
        return seg;
      }
    }
    seg.elapsed = static_cast<double>(steps);
    return seg;
  }

 private:
  LiftedMetropolisPdmp model_;
};

/// Fixed-step discretization of the lifted PDMP: with probability
/// A_k(x) = min_l exp(beta V(x) - beta V(x + (d_k + ... + d_{k+l}) dt))
/// move to (x + d_k dt, k), otherwise switch to (x, k-1). The chain is read
/// as piecewise constant in time between grid points.
class DiscretizedChain {
 public:
  using State = LiftedState;
  struct Particle {
    State x{};
    RngStream stream{};
    std::uint64_t clock = 0;
  };
  using Region = BoxRegion;
  using Path = std::vector<State>;
  static constexpr TimeAxis time_axis = TimeAxis::continuous;

  DiscretizedChain(LiftedMetropolisPdmp model, double dt);

  const LiftedMetropolisPdmp& model() const noexcept { return model_; }
  double dt() const noexcept { return dt_; }

  Particle spawn(const State& s, RngStream stream) const { return {s, stream, 0}; }
  const State& state(const Particle& z) const noexcept { return z.x; }
  bool contains(const Region& w, const State& s) const noexcept { return w.box.contains(s.x); }
  double native_step() const noexcept { return dt_; }
  Region whole_space() const { return {0, Box{}}; }

  /// A_k(x) evaluated in plain floating point.
  double acceptance(Vec2 x, int k) const;
  /// A_k at a lattice state, as used by the step.
  double acceptance(const State& z) const noexcept;
  State step(const State& z, Rng& rng) const noexcept {
    return rng.uniform() < acceptance(z) ? State{shifted(z.x, z.k), z.k}
                                         : State{z.x, model_.previous(z.k)};
  }
  /// Number of grid steps covering `duration`.
  std::uint64_t steps_for(double duration) const noexcept {
    return static_cast<std::uint64_t>(std::llround(duration / dt_));
  }

  template <class G>
  Segment<Particle> evolve(Particle z, double duration, const Region& w, const G& g,
                           Path* path = nullptr) const {
    const std::uint64_t steps = steps_for(duration);
    Segment<Particle> seg{std::move(z)};
    if (path) {
      path->clear();
      path->push_back(seg.end.x);
    }
    AxisCache cache = axis_cache(seg.end.x);
    // Summed before scaling so that g = 1 gives exactly the elapsed time.
    double sum = 0.0;
    for (std::uint64_t i = 0; i < steps; ++i) {
      sum += g(seg.end.x);
      Rng rng = seg.end.stream.at(seg.end.clock);
      step_cached(seg.end.x, cache, rng);
      ++seg.end.clock;
      ++seg.native_steps;
      if (path) path->push_back(seg.end.x);
      if (!contains(w, seg.end.x)) {
        seg.escaped = true;
        seg.elapsed = static_cast<double>(i + 1) * dt_;
        seg.physical_time = seg.elapsed;
        seg.accumulated = sum * dt_;
        return seg;
      }
    }
    seg.elapsed = static_cast<double>(steps) * dt_;
    seg.physical_time = seg.elapsed;
    seg.accumulated = sum * dt_;
    return seg;
  }

 private:
  TorusPoint shifted(TorusPoint x, int k) const noexcept {
    return {x.x + moves_[static_cast<std::size_t>(k)].x, x.y + moves_[static_cast<std::size_t>(k)].y};
  }

  struct Shift {
    std::uint64_t x = 0;
    std::uint64_t y = 0;
  };
  // Per direction: distinct nonzero coordinate shifts, probes as index pairs
  // into them (-1 = unshifted), and where the move d_k dt lands.
  struct ProbeTable {
    std::vector<std::uint64_t> xs, ys;
    std::vector<std::pair<int, int>> probes;
    int move_x = -1, move_y = -1;
  };
  // Axis terms of V at the current position.
  struct AxisCache {
    double ux = 0.0;
    double uy = 0.0;
  };

  AxisCache axis_cache(const State& z) const noexcept {
    const auto& v = model_.potential();
    return {v.axis(from_turns(z.x.x)), v.axis(from_turns(z.x.y))};
  }
  // Same draw and outcome as step(), reusing the cached axis terms.
  void step_cached(State& z, AxisCache& c, Rng& rng) const noexcept;

  LiftedMetropolisPdmp model_;
  double dt_;
  std::vector<Shift> moves_;                // d_k dt as torus increments
  std::vector<std::vector<Shift>> probes_;  // distinct nonzero partial-sum shifts per k
  std::vector<ProbeTable> tables_;
};

/// One step of the discretized chain from z.
inline LiftedState discretized_step(const DiscretizedChain& chain, const LiftedState& z,
                                    Rng& rng) {
  return chain.step(z, rng);
}

}  // namespace parrep::pdmp
