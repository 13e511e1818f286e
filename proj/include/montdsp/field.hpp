#pragma once

#include <array>
#include <cstdint>
#include <stdexcept>

#include "montdsp/int384.hpp"

namespace montdsp {

template <unsigned W>
concept SupportedWord = (W == 24 || W == 32 || W == 64);

template <unsigned W>
constexpr std::uint64_t word_mask() {
  if constexpr (W >= 64) {
    return ~std::uint64_t{0};
  } else {
    return (std::uint64_t{1} << W) - 1;
  }
}

/// A 384-bit value as s = 384 / W little-endian W-bit limbs.
///
/// Every limb is kept below 2^W; the represented value is therefore always
/// below 2^384. Limbs are stored in 64-bit slots regardless of W.
template <unsigned W>
  requires SupportedWord<W>
struct FieldElement {
  static constexpr unsigned kWordBits = W;
  static constexpr unsigned kLimbs = 384 / W;
  static_assert(kLimbs * W == 384);

  std::array<std::uint64_t, kLimbs> limbs{};

  constexpr std::uint64_t operator[](unsigned i) const { return limbs[i]; }
  constexpr std::uint64_t& operator[](unsigned i) { return limbs[i]; }

  constexpr bool is_zero() const {
    for (auto l : limbs) {
      if (l != 0) return false;
    }
    return true;
  }

  constexpr bool well_formed() const {
    for (auto l : limbs) {
      if ((l & ~word_mask<W>()) != 0) return false;
    }
    return true;
  }

  friend constexpr bool operator==(const FieldElement&, const FieldElement&) = default;
};

/// Splits a 384-bit integer into W-bit limbs, least significant first.
template <unsigned W>
constexpr FieldElement<W> split_words(const Int384& x) {
  FieldElement<W> out;
  for (unsigned i = 0; i < FieldElement<W>::kLimbs; ++i) {
    out.limbs[i] = x.bits(i * W, W);
  }
  return out;
}

/// Inverse of split_words. Rejects limbs wider than W bits.
template <unsigned W>
constexpr Int384 join_words(const FieldElement<W>& fe) {
  if (!fe.well_formed()) throw std::invalid_argument("limb exceeds word width");
  Int384 out;
  for (unsigned i = 0; i < FieldElement<W>::kLimbs; ++i) {
    const unsigned lo = i * W;
    const unsigned idx = lo / 64;
    const unsigned off = lo % 64;
    out.words[idx] |= fe.limbs[i] << off;
    if (off != 0 && off + W > 64 && idx + 1 < Int384::kWords) {
      out.words[idx + 1] |= fe.limbs[i] >> (64 - off);
    }
  }
  return out;
}

template <unsigned W>
FieldElement<W> from_hex(std::string_view hex) {
  return split_words<W>(Int384::from_hex(hex));
}

template <unsigned W>
std::string to_hex(const FieldElement<W>& fe) {
  return join_words(fe).to_hex();
}

}  // namespace montdsp
