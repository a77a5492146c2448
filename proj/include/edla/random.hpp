#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace edla {

// Seeded random stream used by every stochastic component.
//
// The engine is std::mt19937_64, whose output sequence is fixed by the
// standard. Conversions to doubles and indices are done here rather than with
// <random> distributions, whose algorithms are implementation-defined, so a
// given seed yields the same run on every platform and standard library.
class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  // Uniform double in [0, 1) with 53 bits of resolution.
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  // Uniform index in [0, n). Requires n > 0.
  std::size_t index(std::size_t n) {
    auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  std::uint64_t next() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace edla
