#include <CLI11.hpp>

#include <atomic>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "parrep/errors.hpp"
#include "parrep/harness/config.hpp"
#include "parrep/harness/consistency.hpp"
#include "parrep/harness/experiments.hpp"
#include "parrep/harness/reports.hpp"
#include "parrep/log.hpp"

namespace {

enum Exit : int { ok = 0, config_error = 1, runtime_error = 2, validation_failed = 3 };

struct CommonOptions {
  std::string config;
  std::string out;
  std::optional<std::uint64_t> seed;
  std::string scale = "desk";
};

void add_common(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("--config", o.config, "key = value config file")->check(CLI::ExistingFile);
  cmd->add_option("--out", o.out, "output directory (overrides out_dir)");
  cmd->add_option("--seed", o.seed, "master seed (overrides the config)");
  cmd->add_option("--scale", o.scale, "default parameter scale")
      ->check(CLI::IsMember({"desk", "full", "paper"}));
}

parrep::RunConfig load(const CommonOptions& o) {
  auto cfg = parrep::default_config(parrep::parse_scale(o.scale));
  if (!o.config.empty()) cfg = parrep::load_config(o.config, cfg);
  if (o.seed) {
    cfg.seed = *o.seed;
    cfg.seed_set = true;
  }
  if (!o.out.empty()) cfg.out_dir = o.out;
  return cfg;
}

void write_both(const std::vector<parrep::ReportRow>& rows, const parrep::RunConfig& cfg,
                const std::string& stem) {
  for (auto fmt : {parrep::ReportFormat::csv, parrep::ReportFormat::json}) {
    const auto path = parrep::emit_reports(rows, fmt, cfg.out_dir, stem);
    std::cout << "wrote " << path.string() << '\n';
  }
}

int cmd_simulate(const CommonOptions& o) {
  auto cfg = load(o);
  cfg.validate();
  const auto stream = parrep::repetition_stream(cfg.seed, cfg.driver, cfg.replicas, cfg.beta,
                                                cfg.t_corr, 0);
  const auto run = parrep::run_driver(cfg, cfg.beta, cfg.replicas, cfg.t_corr, stream);
  parrep::ReportRow row;
  row.algorithm = parrep::algorithm_name(cfg);
  row.R = cfg.replicas;
  row.beta = cfg.beta;
  row.t_corr = cfg.t_corr;
  row.dt = cfg.driver == parrep::Driver::pdmp ? cfg.dt : 0.0;
  row.Dt = cfg.driver == parrep::Driver::pdmp ? cfg.window : 1.0;
  row.t_stop = cfg.t_stop;
  row.seed = cfg.seed;
  row.value = run.estimate;
  row.oracle = parrep::observable_oracle(cfg, cfg.beta);
  row.verdict = run.audit_ok ? "audit-ok" : "audit-mismatch";
  std::printf("estimate %.17g (oracle %.17g)\nT_sim %.17g, %llu iterations\n", run.estimate,
              *row.oracle, run.T_sim, static_cast<unsigned long long>(run.iterations));
  std::printf("serial units %llu, parallel units %.17g, speedup %.6g\n",
              static_cast<unsigned long long>(run.serial_steps), run.parallel_units, run.speedup);
  write_both({row}, cfg, "simulate");
  return run.audit_ok ? ok : runtime_error;
}

int cmd_speedup(const CommonOptions& o) {
  const auto cfg = load(o);
  const auto reports = parrep::run_speedup_experiment(cfg);
  for (const auto& r : reports) {
    std::printf("%s R=%d beta=%g t_corr=%g: speedup %.4f +- %.4f (serial %.6g, parallel %.6g)\n",
                r.algorithm.c_str(), r.R, r.beta, r.t_corr, r.speedup, r.std, r.t_serial_units,
                r.t_parallel_units);
  }
  write_both(parrep::report_rows(cfg, reports), cfg, "speedup");
  parrep::emit_reports(parrep::repetition_rows(cfg, reports), parrep::ReportFormat::csv,
                       cfg.out_dir, "speedup_runs");
  return ok;
}

int cmd_accuracy(const CommonOptions& o) {
  const auto cfg = load(o);
  const auto reports = parrep::run_accuracy_experiment(cfg);
  for (const auto& r : reports) {
    std::printf("%s R=%d beta=%g t_corr=%g: mean %.6f std %.6f oracle %.6f%s\n",
                r.algorithm.c_str(), r.R, r.beta, r.t_corr, r.mean, r.std, r.oracle,
                r.flagged ? "  [flagged]" : "");
  }
  write_both(parrep::report_rows(cfg, reports), cfg, "accuracy");
  parrep::emit_reports(parrep::repetition_rows(cfg, reports), parrep::ReportFormat::csv,
                       cfg.out_dir, "accuracy_runs");
  return ok;
}

struct ValidateOptions {
  std::size_t toy_samples = 100000;
  std::size_t pdmp_samples = 10000;
  bool inject = false;
};

int cmd_validate(const CommonOptions& o, const ValidateOptions& v) {
  const auto cfg = load(o);
  if (!cfg.seed_set) throw parrep::ConfigError("validate: a seed is required");
  parrep::ConsistencyConfig c;
  c.seed = cfg.seed;
  c.toy_samples = v.toy_samples;
  c.pdmp_samples = v.pdmp_samples;
  c.inject_state_coupled = v.inject;
  c.threads = cfg.threads;
  c.pdmp.beta = cfg.beta;
  c.pdmp.dt = cfg.dt;
  const auto report = parrep::run_consistency_suite(c);
  for (const auto& r : report.verdicts) {
    std::printf("%-3s %-4s %-52s stat=%-12.6g p=%s\n", r.id.c_str(), r.passed ? "PASS" : "FAIL",
                r.name.c_str(), r.statistic,
                r.p_value < 0.0 ? "-" : std::to_string(r.p_value).c_str());
  }
  std::filesystem::create_directories(cfg.out_dir);
  const auto path = cfg.out_dir / "consistency.json";
  std::ofstream(path, std::ios::binary) << report.to_json();
  std::cout << "wrote " << path.string() << '\n';
  return report.all_passed() ? ok : validation_failed;
}

int cmd_oracle(const CommonOptions& o) {
  auto cfg = load(o);
  std::vector<parrep::ReportRow> rows;
  for (double beta : cfg.beta_grid()) {
    for (int basin = 1; basin <= 4; ++basin) {
      cfg.observable_basin = basin;
      const double v = parrep::observable_oracle(cfg, beta);
      std::printf("beta=%g W%d %.17g\n", beta, basin, v);
      parrep::ReportRow row;
      row.algorithm = "quadrature-W" + std::to_string(basin);
      row.beta = beta;
      row.seed = cfg.seed;
      row.value = v;
      row.oracle = v;
      row.verdict = "oracle";
      rows.push_back(std::move(row));
    }
  }
  write_both(rows, cfg, "oracle");
  return ok;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Parallel replica dynamics simulator and validation harness"};
  app.require_subcommand(1);
  CommonOptions common;
  ValidateOptions vopt;
  auto* simulate = app.add_subcommand("simulate", "one stationary-average driver run");
  auto* speedup = app.add_subcommand("speedup", "idealized speedup sweep");
  auto* accuracy = app.add_subcommand("accuracy", "stationary-average accuracy sweep");
  auto* validate = app.add_subcommand("validate", "statistical consistency suite");
  auto* oracle = app.add_subcommand("oracle", "quadrature reference values");
  for (auto* cmd : {simulate, speedup, accuracy, validate, oracle}) add_common(cmd, common);
  validate->add_option("--toy-samples", vopt.toy_samples, "samples per toy test");
  validate->add_option("--pdmp-samples", vopt.pdmp_samples, "samples per PDMP test");
  validate->add_flag("--inject-state-coupled", vopt.inject,
                     "use the state-coupled wall clock in the escape-law tests");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? ok : config_error;
  }

  parrep::log::set_warning_handler([](std::string_view msg) {
    static std::atomic<int> shown{0};
    if (shown++ < 5) std::cerr << "warning: " << msg << '\n';
  });

  try {
    if (*simulate) return cmd_simulate(common);
    if (*speedup) return cmd_speedup(common);
    if (*accuracy) return cmd_accuracy(common);
    if (*validate) return cmd_validate(common, vopt);
    return cmd_oracle(common);
  } catch (const parrep::ConfigError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return config_error;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return runtime_error;
  }
}
