#pragma once

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <exception>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "parrep/harness/config.hpp"
#include "parrep/harness/reports.hpp"
#include "parrep/process/rng.hpp"

namespace parrep {

/// Runs fn(0..n-1) on up to `threads` workers (0: hardware concurrency).
/// The first exception thrown by any task is rethrown after all workers join.
template <class F>
void parallel_for(std::size_t n, int threads, F&& fn) {
  std::size_t workers = threads > 0 ? static_cast<std::size_t>(threads)
                                    : std::max(1u, std::thread::hardware_concurrency());
  workers = std::min(workers, n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  auto work = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        fn(i);
      } catch (...) {
        std::lock_guard lock(error_mutex);
        if (!error) error = std::current_exception();
        next = n;
      }
    }
  };
  std::vector<std::jthread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
  pool.clear();
  if (error) std::rethrow_exception(error);
}

/// One stationary-average run of the configured driver.
struct DriverRun {
  double estimate = 0.0;
  double T_sim = 0.0;
  std::uint64_t serial_steps = 0;
  double parallel_units = 0.0;
  double speedup = 0.0;
  std::uint64_t iterations = 0;
  bool audit_checked = false;
  bool audit_ok = true;  // recounted serial steps equal serial_steps
};

/// Stream of repetition `rep` at a sweep point; depends only on the seed
/// and the point's values, not on sweep order or thread count.
RngStream repetition_stream(std::uint64_t seed, Driver driver, int R, double beta, double t_corr,
                            int rep);

DriverRun run_driver(const RunConfig& cfg, double beta, int R, double t_corr, RngStream stream);

struct SpeedupReport {
  std::string algorithm;
  int R = 1;
  double beta = 0.0;
  double t_corr = 0.0;
  double t_serial_units = 0.0;    // mean over repetitions
  double t_parallel_units = 0.0;  // mean over repetitions
  double speedup = 0.0;           // mean of per-repetition ratios
  double std = 0.0;
  int repetitions = 0;
  std::vector<double> per_rep{};
  bool audit_ok = true;
};

struct AccuracyReport {
  std::string algorithm;
  int R = 1;
  double beta = 0.0;
  double t_corr = 0.0;
  double mean = 0.0;
  double std = 0.0;
  double oracle = 0.0;
  int repetitions = 0;
  std::vector<double> estimates{};
  /// |mean - oracle| > 3 std
  bool flagged = false;
};

std::string algorithm_name(const RunConfig& cfg);

/// Exact value of <f> for the configured observable.
double observable_oracle(const RunConfig& cfg, double beta);

/// Sweep over replicas x t_corr x beta grids, sorted by (beta, t_corr, R).
std::vector<SpeedupReport> run_speedup_experiment(const RunConfig& cfg);

/// Sweep over t_corr x beta grids at cfg.replicas, sorted by (beta, t_corr).
std::vector<AccuracyReport> run_accuracy_experiment(const RunConfig& cfg);

/// Aggregate rows (rep = repetition count).
std::vector<ReportRow> report_rows(const RunConfig& cfg, const std::vector<SpeedupReport>& r);
std::vector<ReportRow> report_rows(const RunConfig& cfg, const std::vector<AccuracyReport>& r);
/// One row per repetition.
std::vector<ReportRow> repetition_rows(const RunConfig& cfg, const std::vector<SpeedupReport>& r);
std::vector<ReportRow> repetition_rows(const RunConfig& cfg, const std::vector<AccuracyReport>& r);

}  // namespace parrep
