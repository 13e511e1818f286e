#pragma once

#include <cstdint>
#include <random>

#include "montdsp/int384.hpp"

namespace montdsp {

// Deterministic 384-bit sampler. Uses raw mt19937_64 output with rejection,
// so streams are identical across standard libraries for a given seed.
class Int384Sampler {
 public:
  explicit Int384Sampler(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, bound), bound > 0.
  Int384 below(const Int384& bound) {
    const unsigned bits = bound.bit_length();
    for (;;) {
      Int384 x = raw(bits);
      if (x < bound) return x;
    }
  }

  /// Uniform over all values of the given bit width.
  Int384 raw(unsigned bits) {
    Int384 x;
    for (unsigned i = 0; i < Int384::kWords; ++i) x.words[i] = engine_();
    for (unsigned i = bits; i < Int384::kBits; ++i) {
      x.words[i / 64] &= ~(std::uint64_t{1} << (i % 64));
    }
    return x;
  }

  std::uint64_t next_u64() { return engine_(); }

 private:
  std::mt19937_64 engine_;
};

}  // namespace montdsp
