#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <random>
#include <string_view>

#include "snnforge/core/hash.hpp"

namespace snnforge {

inline constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

inline constexpr double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

/// Stream key for a named component, split from the master seed.
inline std::uint64_t stream_key(std::uint64_t seed, std::string_view name) {
  return splitmix64(fnv1a64(name, splitmix64(seed)));
}

/// Counter-based uniform in [0,1). The same (key, trial, step, row, index)
/// always yields the same value, independent of evaluation order.
inline double counter_uniform(std::uint64_t key, std::uint64_t trial, std::uint64_t step,
                              std::uint64_t row, std::uint64_t index) {
  std::uint64_t h = splitmix64(key ^ splitmix64(trial + 0x632be59bd9b4e019ULL));
  h = splitmix64(h ^ step);
  h = splitmix64(h ^ (row * 0x9e3779b97f4a7c15ULL));
  h = splitmix64(h ^ index);
  return to_unit(h);
}

// Seeded generator for initialisation. Uniform/normal conversions are spelled
// out so values do not depend on the standard library's distributions.
class InitRng {
 public:
  explicit InitRng(std::uint64_t seed) : engine_(seed) {}

  double uniform() { return to_unit(engine_()); }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(2.0 * std::numbers::pi * u2);
    has_spare_ = true;
    return r * std::cos(2.0 * std::numbers::pi * u2);
  }
  double normal(double mean, double stddev) { return mean + stddev * normal(); }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace snnforge
