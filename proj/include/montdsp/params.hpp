#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

#include "montdsp/field.hpp"
#include "montdsp/int384.hpp"

namespace montdsp {

// BLS12-381 base field modulus (381 bits).
inline constexpr std::string_view kBls12381ModulusHex =
    "1a0111ea397fe69a4b1ba7b6434bacd764774b84f38512bf6730d2a0f6b0f6241eabfffeb153ffffb9feffffffffaaab";

class ParamError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// -p^-1 mod 2^w for odd p0 (only the low w bits of p matter), 1 <= w <= 64.
/// Newton iteration on the 2-adic inverse: each step doubles the correct bits.
constexpr std::uint64_t neg_inverse_mod_2w(std::uint64_t p0, unsigned w) {
  if ((p0 & 1U) == 0) throw ParamError("modulus must be odd");
  if (w == 0 || w > 64) throw ParamError("word size out of range");
  std::uint64_t inv = 1;  // correct mod 2
  for (int i = 0; i < 6; ++i) inv *= 2 - p0 * inv;
  const std::uint64_t mask = w == 64 ? ~std::uint64_t{0} : ((std::uint64_t{1} << w) - 1);
  return (~inv + 1) & mask;
}

/// Modulus-derived constants for Montgomery arithmetic with R = 2^384.
template <unsigned W>
struct MontgomeryParams {
  static constexpr unsigned kWordBits = W;
  static constexpr unsigned kLimbs = 384 / W;

  Int384 p;
  Int384 two_p;
  FieldElement<W> p_limbs;
  std::uint64_t p_prime = 0;  // p * p_prime == -1 mod 2^W
  Int384 r_mod_p;             // R mod p
  Int384 r2_mod_p;            // R^2 mod p
  Int384 r_inv;               // R^-1 mod p

  /// True when every invariant holds; used as a self-check on construction.
  bool check() const;
};

namespace detail {

// (2x) mod p for x < p < 2^384.
inline Int384 double_mod(const Int384& x, const Int384& p) {
  Int384 d = x;
  const bool overflow = shl1(d);
  if (overflow || d >= p) d = d - p;
  return d;
}

// x / 2 mod p for x < p, p odd.
inline Int384 halve_mod(const Int384& x, const Int384& p) {
  if (!x.is_odd()) {
    Int384 r = x;
    shr1(r);
    return r;
  }
  Int384 s;
  const bool carry = add_into(s, x, p);
  shr1(s, carry);
  return s;
}

// (a * b) mod p by double-and-add, a, b < p.
inline Int384 mul_mod_slow(const Int384& a, const Int384& b, const Int384& p) {
  Int384 acc;
  for (int i = static_cast<int>(b.bit_length()) - 1; i >= 0; --i) {
    acc = double_mod(acc, p);
    if (b.bit(static_cast<unsigned>(i))) {
      Int384 s;
      const bool carry = add_into(s, acc, a);
      if (carry || s >= p) s = s - p;
      acc = s;
    }
  }
  return acc;
}

}  // namespace detail

template <unsigned W>
bool MontgomeryParams<W>::check() const {
  if (!p.is_odd()) return false;
  // R > 4p  <=>  p < 2^382
  if (p.bit_length() > 382) return false;
  const std::uint64_t mask = word_mask<W>();
  if (((p.words[0] * p_prime + 1) & mask) != 0) return false;
  if (r_mod_p >= p || r2_mod_p >= p || r_inv >= p) return false;
  // R * R^-1 == 1 (mod p), with R == r_mod_p
  if (detail::mul_mod_slow(r_mod_p, r_inv, p) != Int384{1}) return false;
  if (detail::mul_mod_slow(r_mod_p, r_mod_p, p) != r2_mod_p) return false;
  return true;
}

/// Builds the parameter set for modulus p. Rejects even p, p <= 2 and
/// moduli without the R > 4p headroom the chained < 2p bound relies on.
template <unsigned W>
MontgomeryParams<W> compute_params(const Int384& p) {
  if (!p.is_odd()) throw ParamError("modulus must be odd");
  if (p <= Int384{2}) throw ParamError("modulus must be greater than 2");
  if (p.bit_length() > 382) throw ParamError("modulus must satisfy 4p < 2^384");

  MontgomeryParams<W> mp;
  mp.p = p;
  mp.two_p = p + p;
  mp.p_limbs = split_words<W>(p);
  mp.p_prime = neg_inverse_mod_2w(p.words[0], W);

  Int384 x{1};
  for (unsigned i = 0; i < 384; ++i) x = detail::double_mod(x, p);
  mp.r_mod_p = x;
  for (unsigned i = 0; i < 384; ++i) x = detail::double_mod(x, p);
  mp.r2_mod_p = x;

  Int384 inv{1};
  for (unsigned i = 0; i < 384; ++i) inv = detail::halve_mod(inv, p);
  mp.r_inv = inv;

  if (!mp.check()) throw ParamError("derived Montgomery parameters failed self-check");
  return mp;
}

/// Overload for textual moduli; rejects values wider than 384 bits.
template <unsigned W>
MontgomeryParams<W> compute_params(std::string_view p_hex) {
  Int384 p;
  try {
    p = Int384::from_hex(p_hex);
  } catch (const std::invalid_argument& e) {
    throw ParamError(e.what());
  }
  return compute_params<W>(p);
}

/// Parameters for BLS12-381, built once per word size and self-checked.
template <unsigned W>
const MontgomeryParams<W>& bls12_381() {
  static const MontgomeryParams<W> params = compute_params<W>(Int384::from_hex(kBls12381ModulusHex));
  return params;
}

}  // namespace montdsp
