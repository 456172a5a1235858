#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numbers>
#include <random>

namespace landca {

/// SplitMix64 finalizer. Used to derive independent stream keys and as a
/// counter-based hash for per-cell jitter.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

/// Operators that draw random numbers within one step and transition.
enum class RngOperator : std::uint64_t { expander = 0, patcher = 1, expander_reflow = 2 };

/// Deterministic random stream for one (seed, step, transition, operator).
///
/// Engine: std::mt19937_64 (sequence fixed by the standard) seeded with a
/// SplitMix64 chain over the four coordinates. Floating-point conversions are
/// done here rather than through <random> distributions, whose output is
/// implementation-defined.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t step, std::uint64_t transition, RngOperator op) noexcept
      : key_(derive(seed, step, transition, static_cast<std::uint64_t>(op))), engine_(key_) {}

  explicit RngStream(std::uint64_t key) noexcept : key_(key), engine_(key_) {}

  std::uint64_t key() const noexcept { return key_; }

  /// Uniform in [0, 1).
  double uniform() noexcept { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform in (0, 1).
  double uniform_open() noexcept { return (static_cast<double>(engine_() >> 11) + 0.5) * 0x1.0p-53; }

  /// Standard normal by Box-Muller (one draw per call).
  double normal() noexcept {
    const double u1 = uniform_open();
    const double u2 = uniform();
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Tie-breaking jitter in (0, epsilon) for `cell`. Depends only on the stream
  /// key and the cell index, never on draw order.
  double jitter(std::size_t cell, double epsilon = 1e-9) const noexcept {
    const std::uint64_t h = splitmix64(key_ ^ splitmix64(static_cast<std::uint64_t>(cell)));
    return (static_cast<double>(h >> 11) + 0.5) * 0x1.0p-53 * epsilon;
  }

  static std::uint64_t derive(std::uint64_t seed, std::uint64_t step, std::uint64_t transition,
                              std::uint64_t op) noexcept {
    std::uint64_t k = splitmix64(seed);
    k = splitmix64(k ^ step);
    k = splitmix64(k ^ transition);
    return splitmix64(k ^ op);
  }

 private:
  std::uint64_t key_;
  std::mt19937_64 engine_;
};

}  // namespace landca
