#include "parrep/harness/consistency.hpp"

#include <algorithm>
#include <cmath>
#include <nlohmann/json.hpp>
#include <numbers>

#include "parrep/algorithms/parrep.hpp"
#include "parrep/harness/experiments.hpp"
#include "parrep/pdmp/residuals.hpp"
#include "parrep/process/discrete_process.hpp"
#include "parrep/process/serial.hpp"

namespace parrep {
namespace {

constexpr double kSerialCap = 1e12;

struct ToyIndicator {
  double operator()(const std::int64_t& x) const noexcept { return x == 1 ? 1.0 : 0.0; }
};

int toy_exit_label(std::int64_t x) { return x == 2 ? 1 : 0; }

EscapeSamples sized(std::size_t n) {
  EscapeSamples s;
  s.time.resize(n);
  s.exit.resize(n);
  s.g.resize(n);
  return s;
}

ParRepConfig step_config(int replicas, double window, const WallClockModel* wallclock) {
  ParRepConfig c;
  c.replicas = replicas;
  c.window = window;
  c.t_stop = 1.0;
  if (wallclock) {
    c.ordering = Ordering::wallclock;
    c.wallclock = *wallclock;
  }
  return c;
}

int basin_of(const pdmp::LiftedState& z) { return pdmp::basin_label(z.x); }
int basin_of(const pdmp::SkeletonPoint& z) { return pdmp::basin_label(z.xi.x); }

// Calls fn(process, region, seeds, g) with the configured PDMP.
template <class Fn>
void with_pdmp(const PdmpEscapeConfig& cfg, Fn&& fn) {
  const pdmp::LiftedMetropolisPdmp model(cfg.beta);
  const auto w = pdmp::quarter_basin(1);
  const auto f = pdmp::FlowObservable::basin_indicator(1);
  const auto anchors = pdmp::anchor_states(model, w.box);
  if (cfg.kind == PdmpKind::skeleton) {
    const pdmp::SkeletonProcess process(model);
    std::vector<pdmp::SkeletonPoint> seeds;
    const RngStream s(0x5eed);
    std::uint64_t i = 0;
    for (const auto& a : anchors) {
      Rng rng = s.at(i++);
      seeds.push_back(pdmp::skeleton_start(model, a, rng));
    }
    fn(process, w, seeds, process.integral(f));
  } else {
    const pdmp::DiscretizedChain process(model, cfg.dt);
    fn(process, w, anchors, f);
  }
}

}  // namespace

EscapeSamples toy_serial_escapes(std::size_t n, const RngStream& stream, int threads) {
  const RandomWalkProcess process;
  const auto w = integer_interval(0, 1);
  auto out = sized(n);
  parallel_for(n, threads, [&](std::size_t i) {
    const RngStream s = stream.derive(i);
    Rng rng = s.derive(Purpose::restart).at(0);
    const std::int64_t x0 = static_cast<std::int64_t>(rng.below(2));
    const auto e = serial_first_exit(process, w, x0, ToyIndicator{}, s.derive(Purpose::serial),
                                     kSerialCap);
    out.time[i] = e.event.time;
    out.exit[i] = toy_exit_label(e.event.exit_state);
    out.g[i] = e.g_accum;
  });
  return out;
}

EscapeSamples toy_parallel_escapes(std::size_t n, int replicas, const WallClockModel* wallclock,
                                   const RngStream& stream, int threads) {
  const RandomWalkProcess process;
  const auto w = integer_interval(0, 1);
  const auto cfg = step_config(replicas, 1.0, wallclock);
  const StateCost<std::int64_t> cost = [](const std::int64_t& x) { return x == 0 ? 0.5 : 1.0; };
  auto out = sized(n);
  parallel_for(n, threads, [&](std::size_t i) {
    const RngStream s = stream.derive(i);
    Rng rng = s.derive(Purpose::restart).at(0);
    std::vector<std::int64_t> starts;
    for (int r = 0; r < replicas; ++r) starts.push_back(static_cast<std::int64_t>(rng.below(2)));
    const auto p = parrep_parallel_step(process, w, std::span<const std::int64_t>(starts), cfg,
                                        ToyIndicator{}, s.derive(Purpose::parallel), cost);
    out.time[i] = p.T_par;
    out.exit[i] = toy_exit_label(p.exit);
    out.g[i] = p.f_par;
  });
  return out;
}

std::vector<double> toy_joint_counts(const EscapeSamples& s) {
  std::vector<double> counts(20, 0.0);
  for (std::size_t i = 0; i < s.time.size(); ++i) {
    const auto t = std::min<long long>(10, std::llround(s.time[i]));
    counts[static_cast<std::size_t>((t - 1) * 2 + s.exit[i])] += 1.0;
  }
  return counts;
}

EscapeSamples pdmp_serial_escapes(const PdmpEscapeConfig& cfg, std::size_t n,
                                  const RngStream& stream, int threads) {
  auto out = sized(n);
  with_pdmp(cfg, [&](const auto& process, const auto& w, const auto& seeds, const auto& g) {
    using State = typename std::decay_t<decltype(process)>::State;
    DephasingConfig d;
    d.method = DephasingMethod::rejection;
    d.t_corr = cfg.t_corr;
    d.replicas = 1;
    parallel_for(n, threads, [&](std::size_t i) {
      const RngStream s = stream.derive(i);
      const auto q = rejection_dephase(process, w, std::span<const State>(seeds), d,
                                       s.derive(Purpose::dephase));
      const auto e = serial_first_exit(process, w, q.samples.front(), g,
                                       s.derive(Purpose::serial), kSerialCap);
      out.time[i] = e.physical_time;
      out.exit[i] = basin_of(e.event.exit_state);
      out.g[i] = e.g_accum;
    });
  });
  return out;
}

EscapeSamples pdmp_parallel_escapes(const PdmpEscapeConfig& cfg, const WallClockModel* wallclock,
                                    std::size_t n, const RngStream& stream, int threads) {
  auto out = sized(n);
  with_pdmp(cfg, [&](const auto& process, const auto& w, const auto& seeds, const auto& g) {
    using State = typename std::decay_t<decltype(process)>::State;
    const double window = cfg.kind == PdmpKind::skeleton ? 1.0 : cfg.dt;
    const auto pc = step_config(cfg.replicas, window, wallclock);
    DephasingConfig d;
    d.method = DephasingMethod::fleming_viot;
    d.t_corr = cfg.t_corr;
    d.replicas = cfg.replicas;
    parallel_for(n, threads, [&](std::size_t i) {
      const RngStream s = stream.derive(i);
      const auto q =
          dephase(process, w, std::span<const State>(seeds), d, s.derive(Purpose::dephase));
      const auto p = parrep_parallel_step(process, w, std::span<const State>(q.samples), pc, g,
                                          s.derive(Purpose::parallel));
      out.time[i] = p.T_par;
      out.exit[i] = basin_of(p.exit);
      out.g[i] = p.f_par;
    });
  });
  return out;
}

std::pair<std::vector<double>, std::vector<double>> binned_joint_counts(
    const EscapeSamples& reference, const EscapeSamples& other, int time_bins) {
  std::vector<double> sorted = reference.time;
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> edges;
  for (int b = 1; b < time_bins; ++b) {
    edges.push_back(sorted[sorted.size() * static_cast<std::size_t>(b) /
                           static_cast<std::size_t>(time_bins)]);
  }
  int max_label = 0;
  for (int e : reference.exit) max_label = std::max(max_label, e);
  for (int e : other.exit) max_label = std::max(max_label, e);
  const auto labels = static_cast<std::size_t>(max_label + 1);
  auto count = [&](const EscapeSamples& s) {
    std::vector<double> c(static_cast<std::size_t>(time_bins) * labels, 0.0);
    for (std::size_t i = 0; i < s.time.size(); ++i) {
      const auto bin =
          static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), s.time[i]) -
                                   edges.begin());
      c[bin * labels + static_cast<std::size_t>(s.exit[i])] += 1.0;
    }
    return c;
  };
  return {count(reference), count(other)};
}

std::vector<std::uint64_t> splice_samples(double p, std::uint64_t c, std::size_t n,
                                          const RngStream& stream) {
  if (!(p > 0.0 && p <= 1.0)) throw InvalidArgument("splice_samples: p must be in (0, 1]");
  if (c < 1) throw InvalidArgument("splice_samples: fragment length must be positive");
  const double log_q = std::log1p(-p);
  std::vector<std::uint64_t> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const RngStream s = stream.derive(i);
    for (std::uint64_t m = 0;; ++m) {
      Rng rng = s.at(m);
      const auto tau =
          p == 1.0 ? std::uint64_t{1}
                   : static_cast<std::uint64_t>(std::ceil(std::log(rng.uniform_open()) / log_q));
      if (tau <= c) {
        out[i] = m * c + std::max<std::uint64_t>(tau, 1);
        break;
      }
    }
  }
  return out;
}

double mean_difference_z(std::span<const double> a, std::span<const double> b) {
  const auto sa = stats::summarize(a);
  const auto sb = stats::summarize(b);
  const double se = std::hypot(sa.sem, sb.sem);
  if (se == 0.0) return sa.mean == sb.mean ? 0.0 : std::copysign(INFINITY, sa.mean - sb.mean);
  return (sa.mean - sb.mean) / se;
}

ResidualSweep residual_sweep(double beta, double dt, int n) {
  const pdmp::LiftedMetropolisPdmp model(beta);
  const pdmp::DiscretizedChain chain(model, dt);
  const double scale =
      std::max(1e-300, beta * model.potential().derivative_bound() * std::numbers::sqrt2);
  const auto dirs = pdmp::LiftedMetropolisPdmp::default_directions();
  const pdmp::RateMatrix rate = [&](pdmp::Vec2 x, int i, int j) {
    return j == model.previous(i) ? model.switching_rate(x, i) : 0.0;
  };
  const auto pi = [&](pdmp::Vec2 p) { return std::exp(-beta * model.potential()(p)); };
  ResidualSweep out;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      const pdmp::Vec2 x{static_cast<double>(a) / n, static_cast<double>(b) / n};
      for (int k = 0; k < model.direction_count(); ++k) {
        out.lifted_rate = std::max(
            out.lifted_rate, std::abs(pdmp::lifted_rate_identity_residual(model, x, k)) / scale);
        const pdmp::Vec2 y = x + dt * model.direction(k);
        out.discrete_invariance =
            std::max(out.discrete_invariance,
                     std::abs(pdmp::discrete_invariance_residual(chain, x, k)) /
                         std::max(pi(x), pi(y)));
        const pdmp::Vec2 grad = beta * model.potential().gradient(x);
        out.rate_balance = std::max(
            out.rate_balance,
            std::abs(pdmp::rate_balance_residual(rate, dirs, grad, x, k)) / scale);
      }
    }
  }
  return out;
}

bool ConsistencyReport::all_passed() const {
  return std::all_of(verdicts.begin(), verdicts.end(), [](const Verdict& v) { return v.passed; });
}

std::string ConsistencyReport::to_json() const {
  nlohmann::ordered_json doc;
  doc["schema_version"] = kReportSchemaVersion;
  doc["kind"] = "consistency";
  doc["alpha_per_test"] = alpha_per_test;
  doc["all_passed"] = all_passed();
  auto& arr = doc["verdicts"] = nlohmann::ordered_json::array();
  for (const auto& v : verdicts) {
    nlohmann::ordered_json j;
    j["id"] = v.id;
    j["name"] = v.name;
    j["statistic"] = v.statistic;
    j["p_value"] = v.p_value < 0.0 ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(v.p_value);
    j["effect"] = std::isfinite(v.effect) ? nlohmann::ordered_json(v.effect) : nlohmann::ordered_json(nullptr);
    j["effect_name"] = v.effect_name;
    j["passed"] = v.passed;
    j["detail"] = v.detail;
    arr.push_back(std::move(j));
  }
  return doc.dump(2) + '\n';
}

ConsistencyReport run_consistency_suite(const ConsistencyConfig& cfg) {
  const RngStream root = RngStream(cfg.seed).derive(Purpose::experiment);
  auto stream = [&](std::uint64_t id) { return root.derive(id); };
  ConsistencyReport rep;
  // p-value tests: a1-a3, a4-a5, c1, d1-d3.
  constexpr int kPValueTests = 9;
  rep.alpha_per_test = cfg.alpha / kPValueTests;
  const double alpha = rep.alpha_per_test;

  auto p_verdict = [&](std::string id, std::string name, const stats::TestResult& t,
                       std::string detail) {
    Verdict v;
    v.id = std::move(id);
    v.name = std::move(name);
    v.statistic = t.statistic;
    v.p_value = t.p_value;
    v.effect = t.dof > 0.0 ? t.statistic / t.dof : 0.0;
    v.effect_name = "chi2/dof";
    v.passed = t.p_value > alpha;
    v.detail = std::move(detail);
    return v;
  };

  WallClockModel iid{WallClockMode::iid_random, 1.0, {}};
  WallClockModel hetero{WallClockMode::replica_heterogeneous, 1.0, {1.0, 2.0, 4.0}};
  WallClockModel coupled{WallClockMode::state_coupled_invalid, 1.0, {}};
  if (cfg.inject_state_coupled) iid = hetero = coupled;

  // (a) escape laws
  const auto toy_serial = toy_serial_escapes(cfg.toy_samples, stream(1), cfg.threads);
  const auto serial_counts = toy_joint_counts(toy_serial);
  struct ToyPlan {
    const char* id;
    const char* name;
    const WallClockModel* model;
  };
  const ToyPlan plans[] = {{"a1", "toy escape law, synchronous plan", nullptr},
                           {"a2", "toy escape law, iid wall-clock plan", &iid},
                           {"a3", "toy escape law, heterogeneous wall-clock plan", &hetero}};
  std::vector<EscapeSamples> toy_par;
  std::uint64_t sid = 2;
  for (const auto& plan : plans) {
    toy_par.push_back(
        toy_parallel_escapes(cfg.toy_samples, cfg.toy_replicas, plan.model, stream(sid++), cfg.threads));
    const auto t = stats::chi_square_homogeneity(serial_counts, toy_joint_counts(toy_par.back()));
    rep.verdicts.push_back(p_verdict(plan.id, plan.name, t, "R=" + std::to_string(cfg.toy_replicas)));
  }

  const auto pdmp_serial = pdmp_serial_escapes(cfg.pdmp, cfg.pdmp_samples, stream(10), cfg.threads);
  const auto pdmp_sync = pdmp_parallel_escapes(cfg.pdmp, nullptr, cfg.pdmp_samples, stream(11), cfg.threads);
  const auto pdmp_async = pdmp_parallel_escapes(cfg.pdmp, &iid, cfg.pdmp_samples, stream(12), cfg.threads);
  {
    const auto [a, b] = binned_joint_counts(pdmp_serial, pdmp_sync);
    rep.verdicts.push_back(p_verdict("a4", "PDMP escape law, synchronous plan",
                                     stats::chi_square_homogeneity(a, b),
                                     "time decile x exit basin"));
  }
  {
    const auto [a, b] = binned_joint_counts(pdmp_serial, pdmp_async);
    rep.verdicts.push_back(p_verdict("a5", "PDMP escape law, wall-clock plan",
                                     stats::chi_square_homogeneity(a, b),
                                     "time decile x exit basin"));
  }

  // (b) mean contributions
  auto z_verdict = [&](std::string id, std::string name, const EscapeSamples& serial,
                       const EscapeSamples& par) {
    Verdict v;
    v.id = std::move(id);
    v.name = std::move(name);
    const double z = mean_difference_z(par.g, serial.g);
    v.statistic = z;
    v.effect = stats::summarize(par.g).mean - stats::summarize(serial.g).mean;
    v.effect_name = "mean difference";
    v.passed = std::abs(z) < 3.0;
    v.detail = "pass when |z| < 3";
    return v;
  };
  rep.verdicts.push_back(z_verdict("b1", "toy mean contribution, g = 1{x=1}", toy_serial, toy_par[0]));
  rep.verdicts.push_back(z_verdict("b2", "PDMP mean contribution, f = 1{W1}", pdmp_serial, pdmp_sync));

  // (c) memorylessness and independence
  {
    std::vector<std::uint64_t> t;
    for (double x : toy_serial.time) t.push_back(static_cast<std::uint64_t>(std::llround(x)));
    rep.verdicts.push_back(p_verdict("c1", "toy exit time is geometric",
                                     stats::geometric_fit(t, 0.0), "p fitted from the mean"));
    std::vector<int> tb;
    for (auto x : t) tb.push_back(static_cast<int>(std::min<std::uint64_t>(x, 10)));
    const auto mi = stats::mi_permutation_test(tb, toy_serial.exit, cfg.permutations, 0.99, stream(20));
    Verdict v;
    v.id = "c2";
    v.name = "toy exit time independent of exit point";
    v.statistic = mi.observed;
    v.effect = mi.threshold;
    v.effect_name = "null 99% quantile (nats)";
    v.passed = mi.within_null;
    v.detail = std::to_string(cfg.permutations) + " permutations";
    rep.verdicts.push_back(v);
  }

  // (d) splice law
  struct Regime {
    double p;
    std::uint64_t c;
  };
  const Regime regimes[] = {{0.5, 1}, {0.1, 5}, {0.01, 20}};
  int d = 1;
  for (const auto& r : regimes) {
    const auto xs = splice_samples(r.p, r.c, cfg.toy_samples, stream(30 + d));
    const int bins = static_cast<int>(
        std::min(500.0, std::ceil(std::log(0.01) / std::log1p(-std::min(r.p, 0.99)))));
    const auto t = stats::geometric_fit(xs, r.p, std::max(bins, 2));
    char name[96];
    std::snprintf(name, sizeof name, "splice law, p = %g, t_m = %llu", r.p,
                  static_cast<unsigned long long>(r.c));
    rep.verdicts.push_back(p_verdict("d" + std::to_string(d++), name, t, "p known"));
  }

  // (e) bias negative control
  {
    const auto s =
        toy_parallel_escapes(cfg.toy_samples, cfg.bias_replicas, &coupled, stream(40), cfg.threads);
    double hits = 0.0;
    for (std::size_t i = 0; i < s.time.size(); ++i) {
      if (std::llround(s.time[i]) == 1 && s.exit[i] == 1) hits += 1.0;
    }
    const double n = static_cast<double>(s.time.size());
    const double p_hat = hits / n;
    const double sigma = std::sqrt(std::max(p_hat * (1.0 - p_hat), 1.0 / n) / n);
    const double expected = std::pow(0.5, cfg.bias_replicas + 1);
    const double z_biased = (p_hat - expected) / sigma;
    const double z_correct = (p_hat - 0.25) / sigma;
    Verdict v;
    v.id = "e1";
    v.name = "state-coupled wall clock reproduces the bias";
    v.statistic = p_hat;
    v.effect = z_correct;
    v.effect_name = "z vs 1/4";
    v.passed = std::abs(z_biased) < 3.0 && std::abs(z_correct) > 5.0;
    char detail[128];
    std::snprintf(detail, sizeof detail, "P(T=1,X=2) expected %.6g, z = %.3f", expected, z_biased);
    v.detail = detail;
    rep.verdicts.push_back(v);
  }

  // (f) identity residuals
  {
    const auto r = residual_sweep(cfg.pdmp.beta, cfg.pdmp.dt, 100);
    const std::pair<const char*, double> items[] = {
        {"lifted-rate identity", r.lifted_rate},
        {"discrete invariance identity", r.discrete_invariance},
        {"rate balance", r.rate_balance}};
    int k = 1;
    for (const auto& [name, value] : items) {
      Verdict v;
      v.id = "f" + std::to_string(k++);
      v.name = std::string(name) + " residual, 100x100 grid";
      v.statistic = value;
      v.effect = value;
      v.effect_name = "max scaled |residual|";
      v.passed = value < 1e-12;
      v.detail = "pass when < 1e-12";
      rep.verdicts.push_back(v);
    }
  }
  return rep;
}

}  // namespace parrep
