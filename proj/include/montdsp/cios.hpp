#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <stdexcept>

#include "montdsp/field.hpp"
#include "montdsp/params.hpp"

namespace montdsp {

class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Double-width product accumulator: value = hi * 2^W + lo.
template <unsigned W>
struct WideAccumulator {
  std::uint64_t lo = 0;
  std::uint64_t hi = 0;

  /// (hi, lo) = a * b + c + d. Cannot overflow 2W bits for W-bit inputs.
  static constexpr WideAccumulator mac(std::uint64_t a, std::uint64_t b, std::uint64_t c, std::uint64_t d) {
    const u128 v = static_cast<u128>(a) * b + c + d;
    return {static_cast<std::uint64_t>(v) & word_mask<W>(), static_cast<std::uint64_t>(v >> W)};
  }
};

/// One CIOS row over the live window t[i..i+s]:
///   (carry, t[i+j]) = a[j] * b + t[i+j] + carry   for j < s
///   t[i+s] += carry
/// `window` has s + 1 words. Returns the carry dropped from t[i+s], which is
/// zero whenever the caller respects the operand bound.
template <unsigned W>
constexpr std::uint64_t cios_row(std::span<std::uint64_t> window, const FieldElement<W>& a, std::uint64_t b) {
  constexpr unsigned s = FieldElement<W>::kLimbs;
  std::uint64_t carry = 0;
  for (unsigned j = 0; j < s; ++j) {
    const auto acc = WideAccumulator<W>::mac(a[j], b, window[j], carry);
    window[j] = acc.lo;
    carry = acc.hi;
  }
  const u128 top = static_cast<u128>(window[s]) + carry;
  window[s] = static_cast<std::uint64_t>(top) & word_mask<W>();
  return static_cast<std::uint64_t>(top >> W);
}

/// Full 2s-word partial-product array of the CIOS loop, exposed so the
/// hardware models can be compared against it iteration by iteration.
template <unsigned W>
struct CiosState {
  static constexpr unsigned s = FieldElement<W>::kLimbs;
  std::array<std::uint64_t, 2 * s> t{};

  std::span<std::uint64_t> window(unsigned i) { return std::span<std::uint64_t>(t).subspan(i, s + 1); }

  FieldElement<W> upper() const {
    FieldElement<W> r;
    for (unsigned j = 0; j < s; ++j) r[j] = t[s + j];
    return r;
  }
};

/// One outer iteration i: multiplication row, quotient, reduction row.
/// Returns the quotient m used in the reduction row.
template <unsigned W>
constexpr std::uint64_t cios_iteration(CiosState<W>& st, unsigned i, const FieldElement<W>& a, std::uint64_t b_i,
                                       const MontgomeryParams<W>& params) {
  cios_row<W>(st.window(i), a, b_i);
  const std::uint64_t m = (st.t[i] * params.p_prime) & word_mask<W>();
  cios_row<W>(st.window(i), params.p_limbs, m);
  return m;
}

/// Montgomery product a * b * R^-1 (mod p) without the final subtraction.
///
/// Exact for a < R - p and b < R; the result is below a*b/R + p, so inputs
/// under 2p give a result under 2p (R > 4p). The result is congruent, not
/// necessarily canonical: use canonicalize() for [0, p).
template <unsigned W>
FieldElement<W> cios_montmul(const FieldElement<W>& a, const FieldElement<W>& b, const MontgomeryParams<W>& params) {
  CiosState<W> st;
  for (unsigned i = 0; i < FieldElement<W>::kLimbs; ++i) {
    cios_iteration<W>(st, i, a, b[i], params);
  }
  return st.upper();
}

/// Maps u in [0, 2p) to [0, p) with one conditional subtraction.
template <unsigned W>
FieldElement<W> canonicalize(const FieldElement<W>& u, const MontgomeryParams<W>& params) {
  const Int384 v = join_words(u);
  if (v >= params.two_p) throw ContractViolation("canonicalize: value not below 2p");
  if (v >= params.p) return split_words<W>(v - params.p);
  return u;
}

template <unsigned W>
FieldElement<W> to_montgomery(const FieldElement<W>& a, const MontgomeryParams<W>& params) {
  return cios_montmul<W>(a, split_words<W>(params.r2_mod_p), params);
}

template <unsigned W>
FieldElement<W> from_montgomery(const FieldElement<W>& a_bar, const MontgomeryParams<W>& params) {
  // 1 goes in the first operand slot, so any a_bar < R is admissible.
  return canonicalize<W>(cios_montmul<W>(split_words<W>(Int384{1}), a_bar, params), params);
}

/// (a + b) reduced against 2p; operands and result stay in [0, 2p).
template <unsigned W>
FieldElement<W> mont_add(const FieldElement<W>& a, const FieldElement<W>& b, const MontgomeryParams<W>& params) {
  Int384 s = join_words(a) + join_words(b);
  if (s >= params.two_p) s = s - params.two_p;
  return split_words<W>(s);
}

/// (a - b), adding 2p back on borrow; operands and result stay in [0, 2p).
template <unsigned W>
FieldElement<W> mont_sub(const FieldElement<W>& a, const FieldElement<W>& b, const MontgomeryParams<W>& params) {
  Int384 d;
  if (sub_into(d, join_words(a), join_words(b))) d = d + params.two_p;
  return split_words<W>(d);
}

/// Convenience for integer-level callers.
template <unsigned W>
Int384 montmul(const Int384& a, const Int384& b, const MontgomeryParams<W>& params) {
  return join_words(cios_montmul<W>(split_words<W>(a), split_words<W>(b), params));
}

}  // namespace montdsp
