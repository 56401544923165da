#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

namespace drv {

/// SplitMix64 finalizer; used to derive independent child seeds.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

constexpr std::uint64_t fnv1a64(std::string_view s) noexcept {
  std::uint64_t h = 0xCBF29CE484222325ull;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 0x100000001B3ull;
  }
  return h;
}

/// Seed of the per-drone stream: splitmix64(seed XOR fnv1a64(drone_id)).
/// Depends only on the run seed and the drone's own id, so adding or
/// removing other drones never changes an existing drone's draws.
constexpr std::uint64_t drone_stream_seed(std::uint64_t run_seed, std::string_view drone_id) noexcept {
  return splitmix64(run_seed ^ fnv1a64(drone_id));
}

/// Seed of fuzz variant `index`; variant 0 keeps the scenario seed.
constexpr std::uint64_t variant_seed(std::uint64_t run_seed, std::uint64_t index) noexcept {
  if (index == 0) return run_seed;
  return splitmix64(run_seed + 0xD1B54A32D192ED03ull * index);
}

// Seeded stream with explicitly defined draw algorithms. The standard
// distributions are implementation-defined, so uniform and normal draws
// are written out here to keep telemetry identical across toolchains.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Standard normal via Box-Muller; the second variate is cached.
  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double radius = std::sqrt(-2.0 * std::log(u1));
    const double angle = 2.0 * std::numbers::pi * u2;
    spare_ = radius * std::sin(angle);
    has_spare_ = true;
    return radius * std::cos(angle);
  }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace drv
