#pragma once

#include <cstdint>
#include <random>

namespace kgm {

// Deterministic random source. The uniform mapping is spelled out instead of
// going through std::uniform_real_distribution, whose output is
// implementation-defined; identical seeds must reproduce identical runs.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform in [0, 1).
  double uniform() {
    return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
  }

  // Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  std::uint64_t raw() { return engine_(); }

private:
  std::mt19937_64 engine_;
};

}  // namespace kgm
