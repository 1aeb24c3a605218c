#include "parrep/harness/experiments.hpp"

#include <bit>
#include <cmath>
#include <tuple>

#include "parrep/algorithms/parrep.hpp"
#include "parrep/harness/quadrature.hpp"
#include "parrep/harness/stats.hpp"

namespace parrep {
namespace {

std::vector<pdmp::BoxRegion> basins() {
  return {pdmp::quarter_basin(1), pdmp::quarter_basin(2), pdmp::quarter_basin(3),
          pdmp::quarter_basin(4)};
}

pdmp::FlowObservable observable(const RunConfig& cfg) {
  return cfg.observable_basin == 0 ? pdmp::FlowObservable::constant(1.0)
                                   : pdmp::FlowObservable::basin_indicator(cfg.observable_basin);
}

struct Point {
  int R;
  double beta;
  double t_corr;
};

template <class Out, class Fn>
std::vector<Out> sweep(const RunConfig& cfg, std::vector<Point> points, Fn make) {
  std::sort(points.begin(), points.end(), [](const Point& a, const Point& b) {
    return std::tie(a.beta, a.t_corr, a.R) < std::tie(b.beta, b.t_corr, b.R);
  });
  const auto reps = static_cast<std::size_t>(cfg.repetitions);
  std::vector<DriverRun> runs(points.size() * reps);
  parallel_for(runs.size(), cfg.threads, [&](std::size_t i) {
    const Point& p = points[i / reps];
    const int rep = static_cast<int>(i % reps);
    runs[i] = run_driver(cfg, p.beta, p.R, p.t_corr,
                         repetition_stream(cfg.seed, cfg.driver, p.R, p.beta, p.t_corr, rep));
  });
  std::vector<Out> out;
  for (std::size_t k = 0; k < points.size(); ++k) {
    out.push_back(make(points[k], std::span<const DriverRun>(runs.data() + k * reps, reps)));
  }
  return out;
}

ReportRow base_row(const RunConfig& cfg, const std::string& algorithm, int R, double beta,
                   double t_corr) {
  ReportRow row;
  row.algorithm = algorithm;
  row.R = R;
  row.beta = beta;
  row.t_corr = t_corr;
  row.dt = cfg.driver == Driver::pdmp ? cfg.dt : 0.0;
  row.Dt = cfg.driver == Driver::pdmp ? cfg.window : 1.0;
  row.t_stop = cfg.t_stop;
  row.seed = cfg.seed;
  return row;
}

}  // namespace

RngStream repetition_stream(std::uint64_t seed, Driver driver, int R, double beta, double t_corr,
                            int rep) {
  return RngStream(seed)
      .derive(Purpose::experiment)
      .derive(static_cast<std::uint64_t>(driver))
      .derive(static_cast<std::uint64_t>(R))
      .derive(std::bit_cast<std::uint64_t>(beta))
      .derive(std::bit_cast<std::uint64_t>(t_corr))
      .derive(static_cast<std::uint64_t>(rep));
}

DriverRun run_driver(const RunConfig& cfg, double beta, int R, double t_corr, RngStream stream) {
  const auto model = cfg.model(beta);
  const auto regions = basins();
  const auto f = observable(cfg);
  const ParRepConfig pc = cfg.parrep(R, t_corr);
  const auto z0 = pdmp::lifted_state(cfg.start, 0);

  StationaryRun run;
  DriverRun out;
  if (cfg.driver == Driver::skeleton) {
    const pdmp::SkeletonProcess process(model);
    Rng rng = stream.derive(Purpose::serial).at(0);
    run = skeleton_stationary_average(process, regions, pc, f,
                                      pdmp::skeleton_start(model, z0, rng), stream);
  } else {
    const pdmp::DiscretizedChain process(model, cfg.dt);
    run = pdmp_stationary_average(process, regions, pc, f, z0, stream);
  }
  out.estimate = run.estimate;
  out.T_sim = run.totals.T_sim;
  out.serial_steps = run.totals.serial_steps;
  out.parallel_units = run.totals.parallel_units;
  out.speedup = run.totals.speedup();
  out.iterations = run.totals.iterations;
  if (run.trace.complete()) {
    out.audit_checked = true;
    out.audit_ok = recount_serial_steps(run.trace) == out.serial_steps;
    if (cfg.driver == Driver::pdmp) {
      out.audit_ok = out.audit_ok &&
                     static_cast<std::uint64_t>(std::llround(out.T_sim / cfg.dt)) == out.serial_steps;
    }
  }
  return out;
}

std::string algorithm_name(const RunConfig& cfg) {
  const bool sync = cfg.ordering == Ordering::synchronous;
  if (cfg.driver == Driver::skeleton) return sync ? "skeleton-sync" : "skeleton-async";
  return sync ? "pdmp-sync" : "pdmp-async";
}

double observable_oracle(const RunConfig& cfg, double beta) {
  if (cfg.observable_basin == 0) return 1.0;
  const pdmp::PeriodicPotential v{cfg.potential_cos4, cfg.potential_sin2};
  return quadrature_reference([&](pdmp::Vec2 p) { return v(p); }, beta,
                              pdmp::quarter_basin(cfg.observable_basin).box,
                              cfg.quadrature_panels)
      .value;
}

std::vector<SpeedupReport> run_speedup_experiment(const RunConfig& cfg) {
  cfg.validate();
  std::vector<Point> points;
  for (double b : cfg.beta_grid())
    for (double t : cfg.t_corr_grid())
      for (int r : cfg.replicas_grid()) points.push_back({r, b, t});
  const std::string name = algorithm_name(cfg);
  return sweep<SpeedupReport>(cfg, points, [&](const Point& p, std::span<const DriverRun> runs) {
    SpeedupReport s;
    s.algorithm = name;
    s.R = p.R;
    s.beta = p.beta;
    s.t_corr = p.t_corr;
    s.repetitions = static_cast<int>(runs.size());
    for (const auto& r : runs) {
      s.per_rep.push_back(r.speedup);
      s.t_serial_units += static_cast<double>(r.serial_steps);
      s.t_parallel_units += r.parallel_units;
      s.audit_ok = s.audit_ok && r.audit_ok;
    }
    s.t_serial_units /= static_cast<double>(runs.size());
    s.t_parallel_units /= static_cast<double>(runs.size());
    const auto sum = stats::summarize(s.per_rep);
    s.speedup = sum.mean;
    s.std = sum.std;
    return s;
  });
}

std::vector<AccuracyReport> run_accuracy_experiment(const RunConfig& cfg) {
  cfg.validate();
  std::vector<Point> points;
  for (double b : cfg.beta_grid())
    for (double t : cfg.t_corr_grid()) points.push_back({cfg.replicas, b, t});
  std::vector<double> oracles;
  for (double b : cfg.beta_grid()) oracles.push_back(observable_oracle(cfg, b));
  const auto beta_grid = cfg.beta_grid();
  const std::string name = algorithm_name(cfg);
  return sweep<AccuracyReport>(cfg, points, [&](const Point& p, std::span<const DriverRun> runs) {
    AccuracyReport a;
    a.algorithm = name;
    a.R = p.R;
    a.beta = p.beta;
    a.t_corr = p.t_corr;
    a.repetitions = static_cast<int>(runs.size());
    for (const auto& r : runs) a.estimates.push_back(r.estimate);
    const auto sum = stats::summarize(a.estimates);
    a.mean = sum.mean;
    a.std = sum.std;
    const auto it = std::find(beta_grid.begin(), beta_grid.end(), p.beta);
    a.oracle = oracles[static_cast<std::size_t>(it - beta_grid.begin())];
    a.flagged = std::abs(a.mean - a.oracle) > 3.0 * a.std;
    return a;
  });
}

std::vector<ReportRow> report_rows(const RunConfig& cfg, const std::vector<SpeedupReport>& r) {
  std::vector<ReportRow> rows;
  for (const auto& s : r) {
    auto row = base_row(cfg, s.algorithm, s.R, s.beta, s.t_corr);
    row.rep = s.repetitions;
    row.value = s.speedup;
    row.std = s.std;
    row.verdict = s.audit_ok ? "audit-ok" : "audit-mismatch";
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ReportRow> report_rows(const RunConfig& cfg, const std::vector<AccuracyReport>& r) {
  std::vector<ReportRow> rows;
  for (const auto& a : r) {
    auto row = base_row(cfg, a.algorithm, a.R, a.beta, a.t_corr);
    row.rep = a.repetitions;
    row.value = a.mean;
    row.std = a.std;
    row.oracle = a.oracle;
    row.verdict = a.flagged ? "flagged" : "ok";
    rows.push_back(std::move(row));
  }
  return rows;
}

std::vector<ReportRow> repetition_rows(const RunConfig& cfg, const std::vector<SpeedupReport>& r) {
  std::vector<ReportRow> rows;
  for (const auto& s : r) {
    for (std::size_t i = 0; i < s.per_rep.size(); ++i) {
      auto row = base_row(cfg, s.algorithm, s.R, s.beta, s.t_corr);
      row.rep = static_cast<int>(i);
      row.value = s.per_rep[i];
      row.verdict = "run";
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

std::vector<ReportRow> repetition_rows(const RunConfig& cfg, const std::vector<AccuracyReport>& r) {
  std::vector<ReportRow> rows;
  for (const auto& a : r) {
    for (std::size_t i = 0; i < a.estimates.size(); ++i) {
      auto row = base_row(cfg, a.algorithm, a.R, a.beta, a.t_corr);
      row.rep = static_cast<int>(i);
      row.value = a.estimates[i];
      row.oracle = a.oracle;
      row.verdict = "run";
      rows.push_back(std::move(row));
    }
  }
  return rows;
}

}  // namespace parrep
