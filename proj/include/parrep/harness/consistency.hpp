#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "parrep/harness/stats.hpp"
#include "parrep/process/rng.hpp"
#include "parrep/sched/wallclock.hpp"

namespace parrep {

// Sample generators shared by the suite, the acceptance runner and tests.
// Sample i always uses stream.derive(i), so results do not depend on the
// thread count.

/// Escape samples: time, exit label, accumulated observable.
struct EscapeSamples {
  std::vector<double> time;
  std::vector<int> exit;
  std::vector<double> g;
};

/// Random walk on Z in U = {0, 1}, uniform starts, g = 1{x = 1}. Exit
/// labels: 0 for -1, 1 for 2.
EscapeSamples toy_serial_escapes(std::size_t n, const RngStream& stream, int threads = 0);

/// Parallel steps with R replicas from uniform starts. With `wallclock`
/// null the plan is synchronous. In the state-coupled mode a replica
/// starting at 0 finishes its first segment at 0.5, one starting at 1 at 1.
EscapeSamples toy_parallel_escapes(std::size_t n, int replicas, const WallClockModel* wallclock,
                                   const RngStream& stream, int threads = 0);

/// Counts over (T in 1..10+) x (exit label in {0, 1}).
std::vector<double> toy_joint_counts(const EscapeSamples& s);

/// Which lifted process the PDMP samples use.
enum class PdmpKind { skeleton, discretized };

struct PdmpEscapeConfig {
  PdmpKind kind = PdmpKind::skeleton;
  double beta = 3.0;
  double dt = 0.01;      // discretized chain only
  double t_corr = 100.0; // skeleton steps or physical time
  int replicas = 4;
};

/// Serial first exits from W1 of starts dephased by rejection with one
/// copy. Exit labels are the basin of the exit point; g = 1{W1}.
EscapeSamples pdmp_serial_escapes(const PdmpEscapeConfig& cfg, std::size_t n,
                                  const RngStream& stream, int threads = 0);

/// Parallel steps over W1 from Fleming-Viot dephased replicas.
EscapeSamples pdmp_parallel_escapes(const PdmpEscapeConfig& cfg, const WallClockModel* wallclock,
                                    std::size_t n, const RngStream& stream, int threads = 0);

/// Joint counts of (time decile of `reference`, exit label) for both sets.
std::pair<std::vector<double>, std::vector<double>> binned_joint_counts(
    const EscapeSamples& reference, const EscapeSamples& other, int time_bins = 10);

/// Spliced exit times from iid Geometric(p) fragment exit times with
/// fragment lengths t_m = c.
std::vector<std::uint64_t> splice_samples(double p, std::uint64_t c, std::size_t n,
                                          const RngStream& stream);

/// z-score of the difference of two sample means.
double mean_difference_z(std::span<const double> a, std::span<const double> b);

struct ResidualSweep {
  double lifted_rate = 0.0;           // max |r| / (beta |grad V|_inf-bound sqrt 2)
  double discrete_invariance = 0.0;   // max |r| / max(pi(x), pi(x + d dt))
  double rate_balance = 0.0;          // max |r| / (beta |grad V|_inf-bound sqrt 2)
};

/// Residuals of the exact identities on an n x n grid and all directions.
ResidualSweep residual_sweep(double beta, double dt, int n = 100);

struct Verdict {
  std::string id;    // suite item, e.g. "a1"
  std::string name;
  double statistic = 0.0;
  double p_value = -1.0;  // negative when the check is not a p-value test
  double effect = 0.0;
  std::string effect_name;
  bool passed = false;
  std::string detail;
};

struct ConsistencyConfig {
  std::uint64_t seed = 0;
  std::size_t toy_samples = 100000;
  std::size_t pdmp_samples = 10000;
  int toy_replicas = 4;
  PdmpEscapeConfig pdmp{};
  double alpha = 0.01;
  int permutations = 200;
  int bias_replicas = 3;
  /// Replace the valid wall-clock plans of (a) by the state-coupled one.
  bool inject_state_coupled = false;
  int threads = 0;
};

struct ConsistencyReport {
  std::vector<Verdict> verdicts;
  double alpha_per_test = 0.0;  // Bonferroni-corrected level
  bool all_passed() const;
  std::string to_json() const;
};

/// (a) escape laws, (b) mean contributions, (c) memorylessness and
/// independence, (d) splice law, (e) bias negative control, (f) residuals.
ConsistencyReport run_consistency_suite(const ConsistencyConfig& cfg);

}  // namespace parrep
