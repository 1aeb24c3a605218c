#pragma once

#include <cmath>
#include <cstdint>
#include <limits>

namespace parrep {

/// SplitMix64 finalizer. Bijective on 64-bit words.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

/// Small SplitMix64 engine. Satisfies UniformRandomBitGenerator so it can
/// drive <random> distributions, but the helpers below are what the library
/// uses so draws are identical across standard library implementations.
__extension__ using uint128_t = unsigned __int128;

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit constexpr Rng(std::uint64_t state) noexcept : state_(state) {}

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  constexpr result_type operator()() noexcept {
    state_ += kGamma;
    return mix64(state_);
  }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform() noexcept {
    return static_cast<double>(operator()() >> 11) * 0x1.0p-53;
  }

  /// Uniform on (0, 1); safe to feed to log().
  double uniform_open() noexcept {
    return (static_cast<double>(operator()() >> 11) + 0.5) * 0x1.0p-53;
  }

  double exponential(double rate) noexcept {
    return -std::log(uniform_open()) / rate;
  }

  bool bernoulli(double p) noexcept { return uniform() < p; }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t below(std::uint64_t n) noexcept {
    // Lemire's nearly-divisionless method.
    uint128_t m = static_cast<uint128_t>(operator()()) * n;
    auto low = static_cast<std::uint64_t>(m);
    if (low < n) {
      const std::uint64_t threshold = (0 - n) % n;
      while (low < threshold) {
        m = static_cast<uint128_t>(operator()()) * n;
        low = static_cast<std::uint64_t>(m);
      }
    }
    return static_cast<std::uint64_t>(m >> 64);
  }

 private:
  static constexpr std::uint64_t kGamma = 0x9e3779b97f4a7c15ULL;
  std::uint64_t state_;
};

/// Tags separating the independent uses of randomness inside a run.
enum class Purpose : std::uint64_t {
  serial = 1,
  dephase,
  decorrelation,
  parallel,
  wallclock,
  restart,
  branch,
  experiment,
};

/// Key of a counter-based random stream.
///
/// A stream is identified by the master seed and a chain of derivation tags
/// (purpose, replica, epoch, ...). `at(counter)` yields the engine for one
/// native step, so the draws used by step n of a path do not depend on how
/// many other paths were simulated first, or in which order.
class RngStream {
 public:
  constexpr RngStream() noexcept = default;
  explicit constexpr RngStream(std::uint64_t master_seed) noexcept
      : key_(mix64(master_seed ^ 0x6a09e667f3bcc908ULL)) {}

  [[nodiscard]] constexpr RngStream derive(std::uint64_t tag) const noexcept {
    RngStream s;
    s.key_ = mix64(key_ ^ mix64(tag + 0x3c6ef372fe94f82bULL));
    return s;
  }

  [[nodiscard]] constexpr RngStream derive(Purpose p) const noexcept {
    return derive(static_cast<std::uint64_t>(p) << 56);
  }

  [[nodiscard]] constexpr Rng at(std::uint64_t counter) const noexcept {
    return Rng(mix64(key_ + mix64(counter ^ 0xa54ff53a5f1d36f1ULL)));
  }

  [[nodiscard]] constexpr std::uint64_t key() const noexcept { return key_; }

  friend constexpr bool operator==(const RngStream&, const RngStream&) = default;

 private:
  std::uint64_t key_ = 0;
};

}  // namespace parrep
