#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "parrep/algorithms/parrep.hpp"
#include "parrep/pdmp/geometry.hpp"

namespace parrep {

/// Which stationary-average driver a run uses.
enum class Driver {
  skeleton,  // skeleton chain, fragments of one skeleton step
  pdmp,      // discretized continuous-time process, fragments of length window
};

std::string_view to_string(Driver d) noexcept;
Driver parse_driver(std::string_view s);

enum class Scale { desk, full };
Scale parse_scale(std::string_view s);

/// Harness configuration. File format: one `key = value` per line, `#`
/// starts a comment, lists are comma separated. Times are physical time
/// units except `t_corr` for the skeleton driver, which counts skeleton
/// steps. Unknown keys are rejected.
struct RunConfig {
  Driver driver = Driver::pdmp;
  Ordering ordering = Ordering::synchronous;
  WallClockModel wallclock{};
  DephasingMethod dephasing = DephasingMethod::fleming_viot;

  double beta = 3.0;
  double dt = 0.01;      // native step of the discretized process
  double window = 0.01;  // fragment duration
  double potential_cos4 = 1.0;
  double potential_sin2 = 0.2;
  std::vector<pdmp::Vec2> directions = pdmp::LiftedMetropolisPdmp::default_directions();
  int observable_basin = 1;  // f = indicator of this quarter basin, 0 for f = 1
  pdmp::Vec2 start{0.3, 0.3};

  int replicas = 8;
  double t_corr = 6.0;
  double t_stop = 1e5;
  std::vector<int> sweep_replicas{};
  std::vector<double> sweep_t_corr{};
  std::vector<double> sweep_beta{};
  int repetitions = 50;
  std::uint64_t seed = 0;
  bool seed_set = false;
  std::filesystem::path out_dir = "out";
  int threads = 0;  // 0: hardware concurrency
  int quadrature_panels = 64;

  /// Sweep grids with unset entries filled from the scalar fields.
  std::vector<int> replicas_grid() const;
  std::vector<double> t_corr_grid() const;
  std::vector<double> beta_grid() const;

  pdmp::LiftedMetropolisPdmp model(double beta_value) const;
  ParRepConfig parrep(int R, double t_corr_value) const;

  void validate() const;
};

/// Defaults for the given scale, before any file is applied.
RunConfig default_config(Scale scale);

/// Applies `key = value` lines on top of `base`.
RunConfig parse_config(std::string_view text, RunConfig base = default_config(Scale::desk));
RunConfig load_config(const std::filesystem::path& path, RunConfig base = default_config(Scale::desk));

}  // namespace parrep
