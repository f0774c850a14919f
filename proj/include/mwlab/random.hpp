#pragma once

#include <cstdint>
#include <random>

namespace mwlab {

/// Portable deterministic generator: mt19937_64 with explicit conversions
/// (the standard distributions are implementation-defined).
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : g_(seed) {}
  std::uint64_t next() { return g_(); }
  /// uniform in [0, 1)
  double uniform() { return static_cast<double>(g_() >> 11) * 0x1.0p-53; }
  double uniform(double a, double b) { return a + (b - a) * uniform(); }

 private:
  std::mt19937_64 g_;
};

}  // namespace mwlab
