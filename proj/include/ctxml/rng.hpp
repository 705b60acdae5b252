#pragma once

#include <cstdint>
#include <random>

namespace ctxml {

/// Seeded generator used everywhere randomness is needed.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the C++
/// standard. Doubles are produced from the top 53 bits of one engine draw,
/// (draw >> 11) * 2^-53, which lies in [0, 1). Standard library
/// distributions are avoided because their algorithms differ
/// between implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next_u64() { return engine_(); }

  double uniform01() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace ctxml
