#include "parrep/pdmp/lifted_pdmp.hpp"

#include <algorithm>
#include <array>
#include <boost/math/tools/minima.hpp>
#include <cmath>
#include <limits>

namespace parrep::pdmp {

double PeriodicPotential::minimum() const {
  constexpr int samples = 4096;
  int best = 0;
  double best_v = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double v = axis(static_cast<double>(i) / samples);
    if (v < best_v) {
      best_v = v;
      best = i;
    }
  }
  const double lo = static_cast<double>(best - 1) / samples;
  const double hi = static_cast<double>(best + 1) / samples;
  const auto r = boost::math::tools::brent_find_minima(
      [this](double x) { return axis(x); }, lo, hi, std::numeric_limits<double>::digits);
  return 2.0 * std::min(best_v, r.second);
}

namespace {

// Minimizer of the axis term over [lo, lo + width).
double axis_argmin(const PeriodicPotential& v, double lo, double width) {
  constexpr int samples = 2048;
  double best_x = lo;
  double best_v = std::numeric_limits<double>::infinity();
  for (int i = 0; i < samples; ++i) {
    const double x = lo + width * i / samples;
    const double u = v.axis(x);
    if (u < best_v) {
      best_v = u;
      best_x = x;
    }
  }
  const double h = width / samples;
  const double a = std::max(lo, best_x - h);
  const double b = std::min(lo + width * (1.0 - 1e-12), best_x + h);
  const auto r = boost::math::tools::brent_find_minima([&](double x) { return v.axis(x); }, a, b,
                                                       std::numeric_limits<double>::digits);
  return wrap(r.second <= best_v ? r.first : best_x);
}

}  // namespace

Vec2 argmin_in(const PeriodicPotential& v, const Box& box) {
  const Vec2 lo = box.lower();
  const Vec2 w = box.width();
  return {axis_argmin(v, lo.x, std::min(w.x, 1.0)), axis_argmin(v, lo.y, std::min(w.y, 1.0))};
}

std::vector<LiftedState> anchor_states(const LiftedMetropolisPdmp& model, const Box& box) {
  const Vec2 x = argmin_in(model.potential(), box);
  std::vector<LiftedState> out;
  for (int k = 0; k < model.direction_count(); ++k) out.push_back(lifted_state(x, k));
  return out;
}

std::vector<Vec2> LiftedMetropolisPdmp::default_directions() {
  return {{1.0, 0.0}, {-1.0, 0.0}, {0.0, 1.0}, {0.0, -1.0}};
}

LiftedMetropolisPdmp::LiftedMetropolisPdmp(double beta, PeriodicPotential potential,
                                           std::vector<Vec2> directions)
    : beta_(beta), potential_(potential), dirs_(std::move(directions)) {
  if (!(beta >= 0.0)) throw InvalidArgument("LiftedMetropolisPdmp: beta must be nonnegative");
  if (dirs_.size() < 2) throw InvalidArgument("LiftedMetropolisPdmp: need at least two directions");
  Vec2 total{};
  double scale = 0.0;
  for (Vec2 d : dirs_) {
    total += d;
    scale = std::max(scale, norm(d));
  }
  if (norm(total) > 1e-12 * std::max(scale, 1.0)) {
    throw InvalidArgument("LiftedMetropolisPdmp: directions must sum to zero");
  }
  const int n = direction_count();
  partial_.resize(static_cast<std::size_t>(n * n));
  double widest = 0.0;
  for (int k = 0; k < n; ++k) {
    Vec2 s{};
    for (int l = 0; l < n; ++l) {
      s += dirs_[static_cast<std::size_t>((k + l) % n)];
      // The full cycle is the zero vector by construction; store it exactly.
      partial_[static_cast<std::size_t>(k * n + l)] = (l == n - 1) ? Vec2{} : s;
      widest = std::max(widest, norm(s));
    }
  }
  bound_ = beta_ * widest * potential_.derivative_bound() * std::numbers::sqrt2;
}

double LiftedMetropolisPdmp::switching_rate(Vec2 x, int k) const noexcept {
  const Vec2 g = potential_.gradient(x);
  double best = 0.0;  // l = N-1 contributes exactly zero
  for (int l = 0; l + 1 < direction_count(); ++l) {
    best = std::max(best, beta_ * dot(partial_sum(k, l), g));
  }
  return best;
}

SkeletonPoint skeleton_start(const LiftedMetropolisPdmp& model, const LiftedState& xi, Rng& rng) {
  return {xi, sample_holding_time(model, xi, rng)};
}

SkeletonPoint skeleton_step(const LiftedMetropolisPdmp& model, const SkeletonPoint& current,
                            Rng& rng) {
  const LiftedState next = model.jump(model.flow(current.xi, current.theta));
  return {next, sample_holding_time(model, next, rng)};
}

FlowObservable FlowObservable::constant(double c) {
  FlowObservable o;
  o.kind_ = Kind::constant;
  o.c_ = c;
  return o;
}

FlowObservable FlowObservable::indicator(Box box) {
  FlowObservable o;
  o.kind_ = Kind::indicator;
  o.box_ = box;
  return o;
}

FlowObservable FlowObservable::function(Function f, double h) {
  if (!f) throw InvalidArgument("FlowObservable::function: empty function");
  if (!(h > 0.0)) throw InvalidArgument("FlowObservable::function: resolution must be positive");
  FlowObservable o;
  o.kind_ = Kind::function;
  o.f_ = std::move(f);
  o.h_ = h;
  return o;
}

double FlowObservable::at(Vec2 x, int k) const {
  switch (kind_) {
    case Kind::constant:
      return c_;
    case Kind::indicator:
      return box_.contains(x) ? 1.0 : 0.0;
    case Kind::function:
      return f_(Vec2{wrap(x.x), wrap(x.y)}, k);
  }
  return 0.0;
}

double FlowObservable::integrate(Vec2 x, Vec2 v, int k, double len) const {
  if (!(len > 0.0)) return 0.0;
  switch (kind_) {
    case Kind::constant:
      return c_ * len;
    case Kind::indicator:
      return box_.time_inside(x, v, len);
    case Kind::function: {
      double sum = 0.0;
      double t = 0.0;
      while (t < len) {
        const double w = std::min(h_, len - t);
        sum += w * at(x + t * v, k);
        t += w;
      }
      return sum;
    }
  }
  return 0.0;
}

DiscretizedChain::DiscretizedChain(LiftedMetropolisPdmp model, double dt)
    : model_(std::move(model)), dt_(dt) {
  if (!(dt > 0.0)) throw InvalidArgument("DiscretizedChain: time step must be positive");
  const int n = model_.direction_count();
  if (n > 17) throw InvalidArgument("DiscretizedChain: at most 17 directions are supported");
  auto shift = [dt](Vec2 s) { return Shift{advance_turns(0, s.x * dt), advance_turns(0, s.y * dt)}; };
  for (int k = 0; k < n; ++k) {
    moves_.push_back(shift(model_.direction(k)));
    std::vector<Shift> probes;
    for (int l = 0; l + 1 < n; ++l) {
      const Shift s = shift(model_.partial_sum(k, l));
      if (s.x == 0 && s.y == 0) continue;
      const bool seen = std::any_of(probes.begin(), probes.end(),
                                    [&](const Shift& p) { return p.x == s.x && p.y == s.y; });
      if (!seen) probes.push_back(s);
    }
    ProbeTable t;
    auto index_of = [](std::vector<std::uint64_t>& v, std::uint64_t s) {
      if (s == 0) return -1;
      const auto it = std::find(v.begin(), v.end(), s);
      if (it != v.end()) return static_cast<int>(it - v.begin());
      v.push_back(s);
      return static_cast<int>(v.size() - 1);
    };
    for (const Shift& p : probes) t.probes.emplace_back(index_of(t.xs, p.x), index_of(t.ys, p.y));
    t.move_x = index_of(t.xs, moves_.back().x);
    t.move_y = index_of(t.ys, moves_.back().y);
    tables_.push_back(std::move(t));
    probes_.push_back(std::move(probes));
  }
}

void DiscretizedChain::step_cached(State& z, AxisCache& c, Rng& rng) const noexcept {
  const auto& v = model_.potential();
  const ProbeTable& t = tables_[static_cast<std::size_t>(z.k)];
  std::array<double, 16> vx{}, vy{};
  const std::size_t nx = std::min<std::size_t>(t.xs.size(), vx.size());
  const std::size_t ny = std::min<std::size_t>(t.ys.size(), vy.size());
  for (std::size_t i = 0; i < nx; ++i) vx[i] = v.axis(from_turns(z.x.x + t.xs[i]));
  for (std::size_t i = 0; i < ny; ++i) vy[i] = v.axis(from_turns(z.x.y + t.ys[i]));
  const double here = c.ux + c.uy;
  double highest = here;
  for (const auto& [ix, iy] : t.probes) {
    const double px = ix < 0 ? c.ux : vx[static_cast<std::size_t>(ix)];
    const double py = iy < 0 ? c.uy : vy[static_cast<std::size_t>(iy)];
    highest = std::max(highest, px + py);
  }
  const double p = highest == here ? 1.0 : std::exp(model_.beta() * (here - highest));
  if (rng.uniform() < p) {
    z.x = shifted(z.x, z.k);
    if (t.move_x >= 0) c.ux = vx[static_cast<std::size_t>(t.move_x)];
    if (t.move_y >= 0) c.uy = vy[static_cast<std::size_t>(t.move_y)];
  } else {
    z.k = model_.previous(z.k);
  }
}

double DiscretizedChain::acceptance(Vec2 x, int k) const {
  const auto& v = model_.potential();
  const double here = v(x);
  double highest = here;  // l = N-1 has zero displacement
  for (int l = 0; l + 1 < model_.direction_count(); ++l) {
    highest = std::max(highest, v(x + dt_ * model_.partial_sum(k, l)));
  }
  return std::exp(model_.beta() * (here - highest));
}

double DiscretizedChain::acceptance(const State& z) const noexcept {
  const auto& v = model_.potential();
  const double ux = v.axis(from_turns(z.x.x));
  const double uy = v.axis(from_turns(z.x.y));
  const double here = ux + uy;
  double highest = here;
  for (const Shift& s : probes_[static_cast<std::size_t>(z.k)]) {
    const double px = s.x == 0 ? ux : v.axis(from_turns(z.x.x + s.x));
    const double py = s.y == 0 ? uy : v.axis(from_turns(z.x.y + s.y));
    highest = std::max(highest, px + py);
  }
  if (highest == here) return 1.0;
  return std::exp(model_.beta() * (here - highest));
}

}  // namespace parrep::pdmp
