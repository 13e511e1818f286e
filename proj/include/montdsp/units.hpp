#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <vector>

#include "montdsp/clocked.hpp"
#include "montdsp/dsp_slice.hpp"
#include "montdsp/field.hpp"

namespace montdsp {

// Every unit here is a clocked model driven by step(): the argument is what
// the producer presents on the input ports this cycle, the return value is
// what the unit drives on its outputs after the clock edge. An input given
// on step k with latency L is returned by step k + L - 1, so a consumer can
// issue it again at cycle k + L.

struct WideWord {
  bool valid = false;
  std::uint64_t lo = 0;  // low W bits
  std::uint64_t hi = 0;  // high W bits
};

struct WordOperands {
  bool valid = false;
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  std::uint64_t c = 0;
};

namespace detail {

inline constexpr unsigned kLimbBits = 17;

enum class SliceKind { Multiply, AddOnly };

enum class CInput { None, Full, Low17, High47 };

struct SliceSpec {
  SliceKind kind = SliceKind::Multiply;
  unsigned a_limb = 0;
  unsigned b_limb = 0;
  unsigned a_shift = 0;
  std::uint64_t a_mask = 0;
  unsigned b_shift = 0;
  std::uint64_t b_mask = 0;
  ZMux z = ZMux::Zero;
  CInput c = CInput::None;
  unsigned column = 0;
  bool emits = false;  // last slice of its column: P[16:0] is a result digit
  unsigned issue = 1;  // cycle the slice's operand ports are driven
  unsigned ready = 3;  // cycle after which P holds the slice result
};

// Limb widths for the 27x18 tiling: A is left whole when it fits the 27-bit
// signed port, everything else is cut into 17-bit unsigned digits.
template <unsigned W>
std::vector<unsigned> a_limbs() {
  if constexpr (W == 24) return {24};
  if constexpr (W == 32) return {17, 15};
  return {17, 17, 17, 13};
}

template <unsigned W>
std::vector<unsigned> b_limbs() {
  if constexpr (W == 24) return {17, 7};
  if constexpr (W == 32) return {17, 15};
  return {17, 17, 17, 13};
}

// Column-ordered cascade. Within a column each slice adds PCIN; the first
// slice of a new column adds PCIN >> 17. For the 64-bit MADD the upper C
// bits enter through an extra add-only slice closing column 1, the chain
//   P0 = A0*B0 + C[16:0]
//   P1 = A0*B1 + (P0 >> 17)
//   P2 = A1*B0 + P1
//   P3 = P2 + C[63:17]
//   P4 = A2*B0 + (P3 >> 17) ...
template <unsigned W>
std::vector<SliceSpec> cascade_layout(bool with_addend) {
  const auto al = a_limbs<W>();
  const auto bl = b_limbs<W>();
  const unsigned na = static_cast<unsigned>(al.size());
  const unsigned nb = static_cast<unsigned>(bl.size());
  const bool split_c = with_addend && W > kLimbBits + 31;  // C wider than one 48-bit port share

  std::vector<SliceSpec> out;
  for (unsigned col = 0; col + 1 < na + nb; ++col) {
    std::vector<std::pair<unsigned, unsigned>> pairs;
    for (unsigned i = 0; i < na; ++i) {
      if (col >= i && col - i < nb) pairs.emplace_back(i, col - i);
    }
    if (col != 1) std::reverse(pairs.begin(), pairs.end());
    for (std::size_t k = 0; k < pairs.size(); ++k) {
      SliceSpec sp;
      sp.a_limb = pairs[k].first;
      sp.b_limb = pairs[k].second;
      sp.column = col;
      if (out.empty()) {
        sp.z = ZMux::Zero;
        sp.c = with_addend ? (split_c ? CInput::Low17 : CInput::Full) : CInput::None;
      } else {
        sp.z = k == 0 ? ZMux::PcinShift17 : ZMux::Pcin;
      }
      out.push_back(sp);
    }
    if (split_c && col == 1) {
      SliceSpec add;
      add.kind = SliceKind::AddOnly;
      add.c = CInput::High47;
      add.column = 1;
      out.push_back(add);
    }
    out.back().emits = true;
  }

  // Timing: a multiply slice follows its predecessor by one cycle on the
  // cascade; the add-only slice takes its predecessor's P through fabric.
  for (std::size_t k = 0; k < out.size(); ++k) {
    auto& sp = out[k];
    if (sp.kind == SliceKind::Multiply) {
      for (unsigned i = 0; i < sp.a_limb; ++i) sp.a_shift += al[i];
      for (unsigned i = 0; i < sp.b_limb; ++i) sp.b_shift += bl[i];
      sp.a_mask = (1ULL << al[sp.a_limb]) - 1;
      sp.b_mask = (1ULL << bl[sp.b_limb]) - 1;
    }
    if (sp.kind == SliceKind::AddOnly) {
      sp.issue = out[k - 1].ready + 1;
      sp.ready = sp.issue + 1;
    } else {
      sp.issue = k == 0 ? 1 : out[k - 1].ready - 1;
      sp.ready = sp.issue + 2;
    }
  }
  return out;
}

}  // namespace detail

/// MUL_W (with_addend = false) and MADD_W (with_addend = true): a cascade of
/// DSP48E2 slices computing A*B (+ C) as a 2W-bit result, fully pipelined.
template <unsigned W, bool WithAddend>
  requires SupportedWord<W>
class CascadeMultiplier {
 public:
  CascadeMultiplier()
      : layout_(detail::cascade_layout<W>(WithAddend)),
        slices_(layout_.size()),
        p_before_(layout_.size()),
        inputs_(latency() + 1),
        partial_(latency() + 1) {}

  static unsigned latency() {
    static const unsigned value = detail::cascade_layout<W>(WithAddend).back().ready;
    return value;
  }
  static unsigned dsp_count() {
    static const unsigned value = static_cast<unsigned>(detail::cascade_layout<W>(WithAddend).size());
    return value;
  }

  const std::vector<detail::SliceSpec>& layout() const { return layout_; }
  /// P register of slice k after the last step.
  std::uint64_t slice_p(std::size_t k) const { return slices_[k].p(); }

  WideWord step(const WordOperands& in) {
    check_operand(in.a);
    check_operand(in.b);
    if (WithAddend) check_operand(in.c);
    ++cycle_;
    inputs_.push(in);
    for (std::size_t k = 0; k < slices_.size(); ++k) p_before_[k] = slices_[k].p();

    const unsigned L = static_cast<unsigned>(layout_.back().ready);
    for (std::size_t k = 0; k < slices_.size(); ++k) {
      const auto& sp = layout_[k];
      DspPorts ports;
      if (sp.kind == detail::SliceKind::Multiply) {
        const WordOperands& op = inputs_.at(sp.issue - 1);
        ports.a = static_cast<std::int64_t>((op.a >> sp.a_shift) & sp.a_mask);
        ports.b = static_cast<std::int64_t>((op.b >> sp.b_shift) & sp.b_mask);
        ports.opmode.x = XMux::Product;
        ports.opmode.z = sp.z;
        if (k > 0) ports.pcin = p_before_[k - 1];
        if (sp.c != detail::CInput::None) {
          // C is registered once inside the slice, so it trails A/B by one cycle.
          const WordOperands& cop = inputs_.at(sp.issue);
          ports.c = sp.c == detail::CInput::Low17 ? (cop.c & ((1ULL << detail::kLimbBits) - 1)) : cop.c;
          ports.opmode.y = YMux::C;
        }
      } else {
        const std::uint64_t prev = p_before_[k - 1];
        ports.a = static_cast<std::int64_t>(prev >> 18);
        ports.b = static_cast<std::int64_t>(prev & ((1ULL << 18) - 1));
        ports.c = inputs_.at(sp.issue - 1).c >> detail::kLimbBits;
        ports.opmode.x = XMux::AB;
        ports.opmode.y = YMux::C;
        ports.opmode.z = ZMux::Zero;
      }
      slices_[k].tick(ports);

      // Collect result digits for the operation this slice just finished.
      if (cycle_ >= sp.ready) {
        const std::size_t op_id = static_cast<std::size_t>(cycle_ - sp.ready);
        auto& acc = partial_[op_id % partial_.size()];
        const unsigned shift = detail::kLimbBits * sp.column;
        if (k + 1 == slices_.size()) {
          acc += static_cast<u128>(slices_[k].p()) << shift;
        } else if (sp.emits) {
          acc += static_cast<u128>(slices_[k].p() & ((1ULL << detail::kLimbBits) - 1)) << shift;
        }
      }
    }

    WideWord out;
    if (cycle_ >= L) {
      const std::size_t op_id = static_cast<std::size_t>(cycle_ - L);
      auto& acc = partial_[op_id % partial_.size()];
      out.valid = inputs_.at(L - 1).valid;
      out.lo = static_cast<std::uint64_t>(acc) & word_mask<W>();
      out.hi = static_cast<std::uint64_t>(acc >> W) & word_mask<W>();
      acc = 0;
    }
    return out;
  }

 private:
  static void check_operand(std::uint64_t v) {
    if ((v & ~word_mask<W>()) != 0) throw DspConfigError("operand wider than the unit word size");
  }

  std::vector<detail::SliceSpec> layout_;
  std::vector<DspSlice> slices_;
  std::vector<std::uint64_t> p_before_;
  History<WordOperands> inputs_;
  std::vector<u128> partial_;
  std::uint64_t cycle_ = 0;
};

template <unsigned W>
using MulUnit = CascadeMultiplier<W, false>;

template <unsigned W>
using MaddUnit = CascadeMultiplier<W, true>;

/// MADDCARRY_W: MADD_W followed by a carry-accumulate stage. Each valid
/// input produces P = low W bits of A*B + C + CARRY and keeps the high W
/// bits as the next CARRY. An all-zero input emits the held carry, which
/// leaves CARRY at zero.
template <unsigned W>
  requires SupportedWord<W>
class MaddCarryUnit {
 public:
  // One register stage, then the carry add; the 64-bit add gets an extra
  // output register.
  static constexpr unsigned kCarryStages = W == 64 ? 3 : 2;

  MaddCarryUnit() : out_regs_(kCarryStages - 1) {}

  static unsigned latency() { return MaddUnit<W>::latency() + kCarryStages; }
  // The carry register and adder occupy one extra slice, two for the
  // 64-bit word which does not fit a single 48-bit adder.
  static unsigned dsp_count() { return MaddUnit<W>::dsp_count() + (W == 64 ? 2 : 1); }

  std::uint64_t carry() const { return carry_; }

  struct Output {
    bool valid = false;
    std::uint64_t p = 0;
  };

  Output step(const WordOperands& in) {
    Output produced;
    if (stage1_.valid) {
      const u128 s = (static_cast<u128>(stage1_.hi) << W) + stage1_.lo + carry_;
      produced.valid = true;
      produced.p = static_cast<std::uint64_t>(s) & word_mask<W>();
      carry_ = static_cast<std::uint64_t>(s >> W);
    }
    stage1_ = madd_.step(in);
    return out_regs_.push(produced);
  }

 private:
  MaddUnit<W> madd_;
  WideWord stage1_;
  std::uint64_t carry_ = 0;
  DelayLine<Output> out_regs_;
};

/// ADD384: eight 48-bit DSP adders. Two cycles for the registered parallel
/// add, then seven cycles in which every slice absorbs the carry-out of its
/// lower neighbour over CARRYCASCIN. Not pipelined.
class Add384Unit {
 public:
  static constexpr unsigned kSlices = 8;
  static constexpr unsigned kRippleCycles = kSlices - 1;

  Add384Unit() : slices_(make_slices()) {}

  static constexpr unsigned latency() { return 2 + kRippleCycles; }
  static constexpr unsigned dsp_count() { return kSlices; }

  struct Input {
    bool valid = false;
    Int384 a;
    Int384 b;
  };
  struct Output {
    bool valid = false;
    bool busy = false;      // high while an operation is in flight
    bool rejected = false;  // a valid input arrived while busy and was dropped
    Int384 sum;
    bool carry_out = false;
  };

  bool busy() const { return phase_ != 0; }

  Output step(const Input& in) {
    Output out;
    const bool accept = in.valid && !busy();
    out.rejected = in.valid && !accept;

    std::array<bool, kSlices> carry_before{};
    for (unsigned k = 0; k < kSlices; ++k) carry_before[k] = slices_[k].carry_cascade_out();

    for (unsigned k = 0; k < kSlices; ++k) {
      DspPorts ports;
      if (accept) {
        const std::uint64_t chunk = in.a.bits(48 * k, 48);
        ports.a = static_cast<std::int64_t>(chunk >> 18);
        ports.b = static_cast<std::int64_t>(chunk & ((1ULL << 18) - 1));
        ports.c = in.b.bits(48 * k, 48);
      }
      if (phase_ == 1) {
        ports.opmode = {XMux::AB, YMux::C, ZMux::Zero, CarryMux::Zero};
      } else if (phase_ >= 2) {
        ports.opmode = {XMux::Zero, YMux::Zero, ZMux::P, CarryMux::Cascade};
        ports.carry_cascade_in = k > 0 && carry_before[k - 1];
      } else {
        // Idle or accepting: the ports feed the A:B and C input registers.
        ports.opmode = {XMux::AB, YMux::C, ZMux::Zero, CarryMux::Zero};
      }
      slices_[k].tick(ports);
    }

    if (phase_ >= 1) final_carry_ = final_carry_ || slices_[kSlices - 1].carry_cascade_out();

    if (accept) {
      phase_ = 1;
      final_carry_ = false;
    } else if (phase_ != 0) {
      ++phase_;
    }

    if (phase_ == latency()) {
      out.valid = true;
      for (unsigned k = 0; k < kSlices; ++k) out.sum.set_bits(48 * k, 48, slices_[k].p());
      out.carry_out = final_carry_;
      phase_ = 0;
    }
    out.busy = busy();
    return out;
  }

 private:
  // Adders only: the multiplier register is bypassed.
  static std::array<DspSlice, kSlices> make_slices() {
    DspPipeline pipe;
    pipe.m_reg = false;
    std::array<DspSlice, kSlices> slices;
    slices.fill(DspSlice(pipe));
    return slices;
  }

  std::array<DspSlice, kSlices> slices_;
  unsigned phase_ = 0;  // cycles spent on the current operation, 0 when idle
  bool final_carry_ = false;
};

/// MADD384_W: the whole CIOS inner loop in two stages. s parallel
/// MADD_W units form a[j]*b + t[i+j] as (Hi_j, Lo_j); ADD384 then adds the
/// Hi words to the Lo words shifted down one position, with t[i+s] entering
/// at the top. Lo_0 is final as soon as the MADDs finish. Not pipelined.
template <unsigned W>
  requires SupportedWord<W>
class Madd384Unit {
 public:
  static constexpr unsigned s = FieldElement<W>::kLimbs;

  static unsigned latency() { return MaddUnit<W>::latency() + Add384Unit::latency(); }
  static unsigned dsp_count() { return s * MaddUnit<W>::dsp_count() + Add384Unit::dsp_count(); }

  struct Input {
    bool valid = false;
    FieldElement<W> a;
    std::uint64_t b = 0;
    std::array<std::uint64_t, s + 1> window{};
  };
  struct Output {
    bool valid = false;
    bool busy = false;
    bool rejected = false;
    bool lo0_valid = false;  // the least significant word is ready early
    std::uint64_t lo0 = 0;
    std::array<std::uint64_t, s + 1> window{};
    bool overflow = false;  // carry out of the top word; zero under the CIOS bounds
  };

  Madd384Unit() : madds_(s) {}

  bool busy() const { return busy_; }

  Output step(const Input& in) {
    Output out;
    const bool accept = in.valid && !busy_;
    out.rejected = in.valid && !accept;
    if (accept) {
      busy_ = true;
      top_ = in.window[s];
    }

    Add384Unit::Input add_in;
    bool madd_done = false;
    for (unsigned j = 0; j < s; ++j) {
      WordOperands op;
      if (accept) op = {true, in.a[j], in.b, in.window[j]};
      const WideWord r = madds_[j].step(op);
      if (r.valid) {
        madd_done = true;
        hi_[j] = r.hi;
        lo_[j] = r.lo;
      }
    }
    if (madd_done) {
      out.lo0_valid = true;
      out.lo0 = lo_[0];
      lo0_ = lo_[0];
    }
    // The adder's input registers capture the MADD outputs one cycle later.
    if (pending_add_) {
      add_in.valid = true;
      for (unsigned j = 0; j < s; ++j) add_in.a.set_bits(j * W, W, hi_[j]);
      for (unsigned j = 1; j < s; ++j) add_in.b.set_bits((j - 1) * W, W, lo_[j]);
      add_in.b.set_bits((s - 1) * W, W, top_);
    }
    pending_add_ = madd_done;

    const auto sum = adder_.step(add_in);
    if (sum.valid) {
      out.valid = true;
      out.window[0] = lo0_;
      for (unsigned j = 0; j < s; ++j) out.window[j + 1] = sum.sum.bits(j * W, W);
      out.overflow = sum.carry_out;
      busy_ = false;
    }
    out.busy = busy_;
    return out;
  }

 private:
  std::vector<MaddUnit<W>> madds_;
  Add384Unit adder_;
  std::array<std::uint64_t, s> hi_{};
  std::array<std::uint64_t, s> lo_{};
  std::uint64_t top_ = 0;
  std::uint64_t lo0_ = 0;
  bool pending_add_ = false;
  bool busy_ = false;
};

}  // namespace montdsp
