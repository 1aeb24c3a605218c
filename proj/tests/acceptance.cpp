#include <CLI11.hpp>

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "parrep/harness/config.hpp"
#include "parrep/harness/consistency.hpp"
#include "parrep/harness/experiments.hpp"
#include "parrep/harness/reports.hpp"
#include "parrep/log.hpp"

using namespace parrep;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kSeed = 20240611;
constexpr std::size_t kToySamples = 100000;
constexpr std::size_t kPdmpSamples = 10000;
constexpr double kAlpha = 0.01;

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

RngStream stream_for(int criterion, std::uint64_t part = 0) {
  return RngStream(kSeed).derive(static_cast<std::uint64_t>(criterion)).derive(part);
}

Outcome escape_law() {
  const auto serial = toy_serial_escapes(kToySamples, stream_for(1, 0));
  const auto ref = toy_joint_counts(serial);
  const WallClockModel iid{WallClockMode::iid_random, 1.0, {}};
  const WallClockModel hetero{WallClockMode::replica_heterogeneous, 1.0, {1.0, 2.0, 4.0}};
  struct Plan {
    const char* name;
    const WallClockModel* model;
  };
  Outcome o{true, ""};
  std::uint64_t part = 1;
  for (const Plan& p : {Plan{"sync", nullptr}, Plan{"iid", &iid}, Plan{"hetero", &hetero}}) {
    const auto par = toy_parallel_escapes(kToySamples, 4, p.model, stream_for(1, part++));
    const auto t = stats::chi_square_homogeneity(ref, toy_joint_counts(par));
    o.pass = o.pass && t.p_value > kAlpha;
    o.detail += fmt("%s p=%.4f; ", p.name, t.p_value);
  }
  return o;
}

Outcome bias() {
  const WallClockModel coupled{WallClockMode::state_coupled_invalid, 1.0, {}};
  const auto s = toy_parallel_escapes(kToySamples, 3, &coupled, stream_for(2));
  double hits = 0.0;
  for (std::size_t i = 0; i < s.time.size(); ++i) hits += (s.time[i] == 1.0 && s.exit[i] == 1);
  const double n = static_cast<double>(kToySamples);
  const double p = hits / n;
  const double sigma = std::sqrt(p * (1.0 - p) / n);
  const double z16 = (p - 1.0 / 16.0) / sigma;
  const double z4 = (p - 0.25) / sigma;
  return {std::abs(z16) < 3.0 && std::abs(z4) > 5.0,
          fmt("P(T=1,X=2)=%.5f, z vs 1/16 = %.2f, z vs 1/4 = %.1f", p, z16, z4)};
}

Outcome mean_contribution() {
  const auto toy_s = toy_serial_escapes(kToySamples, stream_for(3, 0));
  const auto toy_p = toy_parallel_escapes(kToySamples, 4, nullptr, stream_for(3, 1));
  const double z_toy = mean_difference_z(toy_p.g, toy_s.g);
  PdmpEscapeConfig pc;
  pc.kind = PdmpKind::skeleton;
  pc.beta = 3.0;
  pc.t_corr = 100.0;
  pc.replicas = 4;
  const auto pd_s = pdmp_serial_escapes(pc, kPdmpSamples, stream_for(3, 2));
  const auto pd_p = pdmp_parallel_escapes(pc, nullptr, kPdmpSamples, stream_for(3, 3));
  const double z_pd = mean_difference_z(pd_p.g, pd_s.g);
  return {std::abs(z_toy) < 3.0 && std::abs(z_pd) < 3.0,
          fmt("toy z=%.3f (mean %.5f vs %.5f); PDMP z=%.3f (mean %.4f vs %.4f)", z_toy,
              stats::summarize(toy_p.g).mean, stats::summarize(toy_s.g).mean, z_pd,
              stats::summarize(pd_p.g).mean, stats::summarize(pd_s.g).mean)};
}

Outcome memorylessness() {
  const auto s = toy_serial_escapes(kToySamples, stream_for(4, 0));
  std::vector<std::uint64_t> t;
  std::vector<int> tb;
  for (double x : s.time) {
    t.push_back(static_cast<std::uint64_t>(std::llround(x)));
    tb.push_back(static_cast<int>(std::min<std::uint64_t>(t.back(), 10)));
  }
  const auto geo = stats::geometric_fit(t, 0.0);
  const auto mi = stats::mi_permutation_test(tb, s.exit, 200, 0.99, stream_for(4, 1));
  return {geo.p_value > kAlpha && mi.within_null,
          fmt("geometric p=%.4f; MI=%.3g nats, null 99%% quantile %.3g", geo.p_value, mi.observed,
              mi.threshold)};
}

Outcome splice() {
  struct Regime {
    double p;
    std::uint64_t c;
    int bins;
  };
  Outcome o{true, ""};
  std::uint64_t part = 0;
  for (const Regime& r : {Regime{0.5, 1, 7}, Regime{0.1, 5, 44}, Regime{0.01, 20, 459}}) {
    const auto xs = splice_samples(r.p, r.c, kToySamples, stream_for(5, part++));
    const auto t = stats::geometric_fit(xs, r.p, r.bins);
    o.pass = o.pass && t.p_value > kAlpha;
    o.detail += fmt("(p=%g,t_m=%llu) p-value=%.4f; ", r.p, static_cast<unsigned long long>(r.c), t.p_value);
  }
  return o;
}

Outcome residuals() {
  const auto r = residual_sweep(3.0, 0.01, 100);
  return {r.lifted_rate < 1e-12 && r.discrete_invariance < 1e-12,
          fmt("lifted-rate %.3g, discrete invariance %.3g (rate balance %.3g)", r.lifted_rate,
              r.discrete_invariance, r.rate_balance)};
}

RunConfig accuracy_config(Driver d) {
  RunConfig c = default_config(Scale::desk);
  c.driver = d;
  c.seed = kSeed;
  c.seed_set = true;
  c.beta = 3.0;
  c.replicas = 8;
  c.t_stop = 1e5;
  c.repetitions = 50;
  c.t_corr = d == Driver::skeleton ? 100.0 : 6.0;
  c.sweep_t_corr = {c.t_corr};
  return c;
}

Outcome accuracy(const fs::path& out) {
  Outcome o{true, ""};
  for (Driver d : {Driver::skeleton, Driver::pdmp}) {
    const auto cfg = accuracy_config(d);
    const auto reports = run_accuracy_experiment(cfg);
    const auto stem = std::string("accuracy_") + std::string(to_string(d));
    emit_reports(report_rows(cfg, reports), ReportFormat::csv, out, stem);
    emit_reports(report_rows(cfg, reports), ReportFormat::json, out, stem);
    emit_reports(repetition_rows(cfg, reports), ReportFormat::csv, out, stem + "_runs");
    const auto& r = reports.back();
    const bool ok = std::abs(r.mean - r.oracle) <= 3.0 * r.std;
    o.pass = o.pass && ok;
    o.detail += fmt("%s T_corr=%g: %.5f +- %.5f vs oracle %.5f; ", r.algorithm.c_str(), r.t_corr,
                    r.mean, r.std, r.oracle);
  }
  return o;
}

RunConfig speedup_config() {
  RunConfig c = default_config(Scale::desk);
  c.driver = Driver::pdmp;
  c.seed = kSeed;
  c.seed_set = true;
  c.beta = 3.0;
  c.t_stop = 1e5;
  c.repetitions = 20;
  c.t_corr = 6.0;
  return c;
}

Outcome speedup(const fs::path& out) {
  auto by_r = speedup_config();
  by_r.sweep_replicas = {1, 2, 4, 8};
  by_r.sweep_t_corr = {6.0};
  const auto rs = run_speedup_experiment(by_r);
  auto by_t = speedup_config();
  by_t.sweep_replicas = {8};
  by_t.sweep_t_corr = {2.0, 20.0};
  auto ts = run_speedup_experiment(by_t);
  ts.push_back(rs.back());
  std::sort(ts.begin(), ts.end(), [](const auto& a, const auto& b) { return a.t_corr < b.t_corr; });

  auto rows = report_rows(by_r, rs);
  for (auto& row : report_rows(by_t, ts)) {
    if (row.t_corr != 6.0) rows.push_back(row);
  }
  emit_reports(rows, ReportFormat::csv, out, "speedup");
  emit_reports(rows, ReportFormat::json, out, "speedup");

  Outcome o{true, ""};
  for (double s : rs.front().per_rep) o.pass = o.pass && s == 1.0;
  o.detail += fmt("R=1 exactly 1: %s; R:", o.pass ? "yes" : "no");
  for (std::size_t i = 0; i < rs.size(); ++i) {
    o.detail += fmt(" %d->%.3f+-%.3f", rs[i].R, rs[i].speedup, rs[i].std);
    o.pass = o.pass && rs[i].audit_ok;
    if (i > 0 && rs[i].speedup < rs[i - 1].speedup - (rs[i].std + rs[i - 1].std)) o.pass = false;
  }
  o.detail += "; T_corr:";
  for (std::size_t i = 0; i < ts.size(); ++i) {
    o.detail += fmt(" %g->%.3f+-%.3f", ts[i].t_corr, ts[i].speedup, ts[i].std);
    o.pass = o.pass && ts[i].audit_ok;
    if (i > 0 && ts[i].speedup > ts[i - 1].speedup + (ts[i].std + ts[i - 1].std)) o.pass = false;
  }
  return o;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Reduced runs of every report-producing path, written to `dir`.
void determinism_bundle(const fs::path& dir, int threads) {
  for (Driver d : {Driver::skeleton, Driver::pdmp}) {
    auto cfg = accuracy_config(d);
    cfg.t_stop = 5e3;
    cfg.repetitions = 4;
    cfg.threads = threads;
    const auto stem = std::string("accuracy_") + std::string(to_string(d));
    const auto a = run_accuracy_experiment(cfg);
    emit_reports(report_rows(cfg, a), ReportFormat::csv, dir, stem);
    emit_reports(report_rows(cfg, a), ReportFormat::json, dir, stem);
    emit_reports(repetition_rows(cfg, a), ReportFormat::csv, dir, stem + "_runs");
  }
  auto sp = speedup_config();
  sp.t_stop = 2e3;
  sp.repetitions = 3;
  sp.sweep_replicas = {1, 2, 4};
  sp.ordering = Ordering::wallclock;
  sp.wallclock = {WallClockMode::iid_random, 1.0, {}};
  sp.threads = threads;
  const auto s = run_speedup_experiment(sp);
  emit_reports(report_rows(sp, s), ReportFormat::csv, dir, "speedup");
  emit_reports(report_rows(sp, s), ReportFormat::json, dir, "speedup");
  ConsistencyConfig cc;
  cc.seed = kSeed;
  cc.toy_samples = 5000;
  cc.pdmp_samples = 100;
  cc.pdmp.t_corr = 20.0;
  cc.threads = threads;
  std::ofstream(dir / "consistency.json", std::ios::binary) << run_consistency_suite(cc).to_json();
}

Outcome determinism(const fs::path& out) {
  const auto a = out / "determinism_a";
  const auto b = out / "determinism_b";
  fs::remove_all(a);
  fs::remove_all(b);
  determinism_bundle(a, 1);
  determinism_bundle(b, 4);
  Outcome o{true, ""};
  int files = 0;
  for (const auto& entry : fs::directory_iterator(a)) {
    const auto other = b / entry.path().filename();
    ++files;
    if (!fs::exists(other) || slurp(entry.path()) != slurp(other)) {
      o.pass = false;
      o.detail += "differs: " + entry.path().filename().string() + "; ";
    }
  }
  o.pass = o.pass && files >= 9;
  o.detail += fmt("%d report files compared byte for byte (1 vs 4 worker threads)", files);
  return o;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria runner"};
  std::string out = "acceptance_out";
  std::vector<int> only;
  app.add_option("--out", out, "directory for report files");
  app.add_option("--only", only, "run only these criteria");
  CLI11_PARSE(app, argc, argv);
  log::set_warning_handler([](std::string_view) {});
  const fs::path dir(out);
  fs::create_directories(dir);

  const std::vector<std::pair<int, std::function<Outcome()>>> criteria{
      {1, escape_law},
      {2, bias},
      {3, mean_contribution},
      {4, memorylessness},
      {5, splice},
      {6, residuals},
      {7, [&] { return accuracy(dir); }},
      {8, [&] { return speedup(dir); }},
      {9, [&] { return determinism(dir); }},
  };
  bool all = true;
  std::ofstream summary(dir / "acceptance.txt", std::ios::binary);
  for (const auto& [id, run] : criteria) {
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = run();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const auto line = fmt("CRITERION %d %s: ", id, o.pass ? "PASS" : "FAIL") + o.detail +
                      fmt(" [%.1f s]", secs);
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
    summary << line << '\n';
    all = all && o.pass;
  }
  return all ? 0 : 1;
}
