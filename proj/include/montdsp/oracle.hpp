#pragma once

#include <gmpxx.h>

#include <string>

#include "montdsp/int384.hpp"
#include "montdsp/params.hpp"

namespace montdsp::oracle {

// Arbitrary-precision reference arithmetic (GMP). Shares nothing with the
// word-level CIOS code; it only sees the modulus and integers.

inline mpz_class to_mpz(const Int384& x) { return mpz_class(x.to_hex(), 16); }

inline Int384 from_mpz(const mpz_class& v) {
  if (v < 0 || mpz_sizeinbase(v.get_mpz_t(), 2) > 384) throw std::invalid_argument("oracle value out of 384-bit range");
  return Int384::from_hex(v.get_str(16));
}

class Field {
 public:
  explicit Field(const Int384& p) : p_(to_mpz(p)) {
    r_ = mpz_class(1) << 384;
    if (mpz_invert(r_inv_.get_mpz_t(), r_.get_mpz_t(), p_.get_mpz_t()) == 0) {
      throw std::invalid_argument("R not invertible mod p");
    }
  }

  Field() : Field(Int384::from_hex(kBls12381ModulusHex)) {}

  const mpz_class& p() const { return p_; }
  const mpz_class& r_inv() const { return r_inv_; }

  mpz_class mod(const mpz_class& x) const {
    mpz_class r = x % p_;
    if (r < 0) r += p_;
    return r;
  }

  /// a * b * R^-1 mod p, canonical.
  Int384 mont_product(const Int384& a, const Int384& b) const {
    return from_mpz(mod(to_mpz(a) * to_mpz(b) * r_inv_));
  }

  /// x * R^-1 mod p: the field value of a Montgomery-domain residue.
  Int384 to_field(const Int384& x) const { return from_mpz(mod(to_mpz(x) * r_inv_)); }

  /// x * R mod p.
  Int384 to_mont(const Int384& x) const { return from_mpz(mod(to_mpz(x) * r_)); }

  Int384 reduce(const Int384& x) const { return from_mpz(mod(to_mpz(x))); }

  /// -p^-1 mod 2^w by extended Euclid (mpz_invert).
  std::uint64_t p_prime(unsigned w) const {
    const mpz_class m = mpz_class(1) << w;
    mpz_class inv;
    mpz_invert(inv.get_mpz_t(), p_.get_mpz_t(), m.get_mpz_t());
    mpz_class neg = (m - inv) % m;
    return static_cast<std::uint64_t>(std::stoull(neg.get_str(16), nullptr, 16));
  }

 private:
  mpz_class p_;
  mpz_class r_;
  mpz_class r_inv_;
};

}  // namespace montdsp::oracle
