#include "parrep/harness/config.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "parrep/errors.hpp"

namespace parrep {
namespace {

std::string_view trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string_view> split(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  for (;;) {
    const auto pos = s.find(sep, start);
    out.push_back(trim(s.substr(start, pos - start)));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

[[noreturn]] void bad(std::string_view key, std::string_view value, std::string_view what) {
  throw ConfigError("config key '" + std::string(key) + "': cannot read '" + std::string(value) +
                    "' as " + std::string(what));
}

double to_double(std::string_view key, std::string_view v) {
  double x = 0.0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || p != v.data() + v.size()) bad(key, v, "a number");
  return x;
}

std::int64_t to_int(std::string_view key, std::string_view v) {
  std::int64_t x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || p != v.data() + v.size()) bad(key, v, "an integer");
  return x;
}

std::uint64_t to_u64(std::string_view key, std::string_view v) {
  std::uint64_t x = 0;
  const auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), x);
  if (ec != std::errc{} || p != v.data() + v.size()) bad(key, v, "an unsigned 64-bit integer");
  return x;
}

std::vector<double> to_doubles(std::string_view key, std::string_view v) {
  std::vector<double> out;
  for (auto part : split(v, ',')) out.push_back(to_double(key, part));
  return out;
}

std::vector<int> to_ints(std::string_view key, std::string_view v) {
  std::vector<int> out;
  for (auto part : split(v, ',')) out.push_back(static_cast<int>(to_int(key, part)));
  return out;
}

pdmp::Vec2 to_vec(std::string_view key, std::string_view v) {
  const auto parts = split(v, ',');
  if (parts.size() != 2) bad(key, v, "a pair x,y");
  return {to_double(key, parts[0]), to_double(key, parts[1])};
}

void apply(RunConfig& c, std::string_view key, std::string_view v) {
  if (key == "algorithm" || key == "driver") {
    c.driver = parse_driver(v);
  } else if (key == "ordering") {
    c.ordering = parse_ordering(v);
  } else if (key == "wallclock") {
    c.wallclock.mode = parse_wallclock_mode(v);
  } else if (key == "wallclock.mean") {
    c.wallclock.mean_cost = to_double(key, v);
  } else if (key == "wallclock.speeds") {
    c.wallclock.speeds = to_doubles(key, v);
  } else if (key == "dephasing") {
    c.dephasing = parse_dephasing_method(v);
  } else if (key == "beta") {
    c.beta = to_double(key, v);
  } else if (key == "dt" || key == "dt_native") {
    c.dt = to_double(key, v);
  } else if (key == "window" || key == "dt_fragment") {
    c.window = to_double(key, v);
  } else if (key == "potential.cos4") {
    c.potential_cos4 = to_double(key, v);
  } else if (key == "potential.sin2") {
    c.potential_sin2 = to_double(key, v);
  } else if (key == "directions") {
    c.directions.clear();
    for (auto d : split(v, ';')) c.directions.push_back(to_vec(key, d));
  } else if (key == "observable.basin") {
    c.observable_basin = static_cast<int>(to_int(key, v));
  } else if (key == "start") {
    c.start = to_vec(key, v);
  } else if (key == "replicas") {
    c.replicas = static_cast<int>(to_int(key, v));
  } else if (key == "t_corr") {
    c.t_corr = to_double(key, v);
  } else if (key == "t_stop") {
    c.t_stop = to_double(key, v);
  } else if (key == "sweep.replicas") {
    c.sweep_replicas = to_ints(key, v);
  } else if (key == "sweep.t_corr") {
    c.sweep_t_corr = to_doubles(key, v);
  } else if (key == "sweep.beta") {
    c.sweep_beta = to_doubles(key, v);
  } else if (key == "repetitions") {
    c.repetitions = static_cast<int>(to_int(key, v));
  } else if (key == "seed") {
    c.seed = to_u64(key, v);
    c.seed_set = true;
  } else if (key == "out_dir") {
    c.out_dir = std::string(v);
  } else if (key == "threads") {
    c.threads = static_cast<int>(to_int(key, v));
  } else if (key == "quadrature.panels") {
    c.quadrature_panels = static_cast<int>(to_int(key, v));
  } else {
    throw ConfigError("unknown config key '" + std::string(key) + "'");
  }
}

}  // namespace

std::string_view to_string(Driver d) noexcept { return d == Driver::skeleton ? "skeleton" : "pdmp"; }

Driver parse_driver(std::string_view s) {
  if (s == "skeleton") return Driver::skeleton;
  if (s == "pdmp" || s == "continuous") return Driver::pdmp;
  throw ConfigError("unknown algorithm '" + std::string(s) + "' (expected skeleton or pdmp)");
}

Scale parse_scale(std::string_view s) {
  if (s == "desk") return Scale::desk;
  if (s == "full" || s == "paper") return Scale::full;
  throw ConfigError("unknown scale '" + std::string(s) + "' (expected desk or full)");
}

RunConfig default_config(Scale scale) {
  RunConfig c;
  if (scale == Scale::desk) {
    c.sweep_replicas = {1, 2, 4, 8};
    c.t_stop = 1e5;
    c.repetitions = 50;
  } else {
    c.sweep_replicas = {1, 10, 20, 50, 100};
    c.replicas = 100;
    c.t_stop = 1e6;
    c.repetitions = 50;
  }
  return c;
}

RunConfig parse_config(std::string_view text, RunConfig base) {
  std::size_t line_no = 0;
  for (auto raw : split(text, '\n')) {
    ++line_no;
    const auto hash = raw.find('#');
    const auto line = trim(raw.substr(0, hash));
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string_view::npos) {
      throw ConfigError("config line " + std::to_string(line_no) + ": expected key = value");
    }
    const auto key = trim(line.substr(0, eq));
    const auto value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty()) {
      throw ConfigError("config line " + std::to_string(line_no) + ": empty key or value");
    }
    apply(base, key, value);
  }
  return base;
}

RunConfig load_config(const std::filesystem::path& path, RunConfig base) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path.string() + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

std::vector<int> RunConfig::replicas_grid() const {
  return sweep_replicas.empty() ? std::vector<int>{replicas} : sweep_replicas;
}

std::vector<double> RunConfig::t_corr_grid() const {
  return sweep_t_corr.empty() ? std::vector<double>{t_corr} : sweep_t_corr;
}

std::vector<double> RunConfig::beta_grid() const {
  return sweep_beta.empty() ? std::vector<double>{beta} : sweep_beta;
}

pdmp::LiftedMetropolisPdmp RunConfig::model(double beta_value) const {
  return pdmp::LiftedMetropolisPdmp(beta_value, {potential_cos4, potential_sin2}, directions);
}

ParRepConfig RunConfig::parrep(int R, double t_corr_value) const {
  ParRepConfig p;
  p.replicas = R;
  p.t_corr = t_corr_value;
  p.window = driver == Driver::skeleton ? 1.0 : window;
  p.t_stop = t_stop;
  p.ordering = ordering;
  p.wallclock = wallclock;
  p.dephasing = dephasing;
  p.seed = seed;
  return p;
}

void RunConfig::validate() const {
  if (!seed_set) throw ConfigError("config: 'seed' is required");
  if (!(beta >= 0.0)) throw ConfigError("config: beta must be nonnegative");
  if (!(dt > 0.0)) throw ConfigError("config: dt must be positive");
  if (!(window > 0.0)) throw ConfigError("config: window must be positive");
  if (driver == Driver::pdmp) {
    const double ratio = window / dt;
    if (std::abs(ratio - std::round(ratio)) > 1e-9 || ratio < 0.5) {
      throw ConfigError("config: window must be a positive multiple of dt");
    }
  }
  if (!(t_stop > 0.0)) throw ConfigError("config: t_stop must be positive");
  if (repetitions < 1) throw ConfigError("config: repetitions must be at least 1");
  if (replicas < 1) throw ConfigError("config: replicas must be at least 1");
  if (observable_basin < 0 || observable_basin > 4) {
    throw ConfigError("config: observable.basin must be in 0..4 (0: f = 1)");
  }
  if (quadrature_panels < 1) throw ConfigError("config: quadrature.panels must be positive");
  for (int r : replicas_grid()) {
    if (r < 1) throw ConfigError("config: sweep.replicas entries must be at least 1");
  }
  for (double t : t_corr_grid()) {
    if (!(t >= 0.0)) throw ConfigError("config: sweep.t_corr entries must be nonnegative");
  }
  for (double b : beta_grid()) {
    if (!(b >= 0.0)) throw ConfigError("config: sweep.beta entries must be nonnegative");
  }
  if (ordering == Ordering::wallclock) {
    try {
      wallclock.validate();
    } catch (const Error& e) {
      throw ConfigError(std::string("config: ") + e.what());
    }
    if (wallclock.reads_state()) {
      throw ConfigError("config: the state-coupled wall-clock model is only for the bias test");
    }
  }
  try {
    (void)model(beta);
  } catch (const Error& e) {
    throw ConfigError(std::string("config: ") + e.what());
  }
}

}  // namespace parrep
