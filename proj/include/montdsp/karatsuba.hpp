#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>
#include <string_view>
#include <vector>

#include "montdsp/clocked.hpp"
#include "montdsp/design_common.hpp"
#include "montdsp/trace.hpp"
#include "montdsp/tstorage.hpp"

namespace montdsp {

enum class DspMode { Forced, Auto };

inline std::string_view to_string(DspMode m) { return m == DspMode::Forced ? "forced" : "auto"; }

/// Karatsuba product of two `bits`-wide operands with `levels` of recursion:
///   Y = (A1 + A0)(B1 + B0), U = A0 B0, Z = A1 B1
///   P = U + (Y - U - Z) 2^h + Z 2^(2h)
/// The low half is h = bits / 2 wide; the high half takes the remainder. The
/// middle term is checked to lie in [0, 2^(bits+2)) at every level.
inline u128 karatsuba_mul(u128 a, u128 b, unsigned bits, unsigned levels) {
  if (bits > 64) throw std::invalid_argument("karatsuba_mul: operands wider than 64 bits");
  if (levels == 0 || bits < 2) return a * b;
  const unsigned h = bits / 2;
  const unsigned hi_bits = bits - h;
  const u128 mask = (u128{1} << h) - 1;
  const u128 a0 = a & mask, a1 = a >> h;
  const u128 b0 = b & mask, b1 = b >> h;
  const unsigned sum_bits = std::max(h, hi_bits) + 1;
  const u128 u = karatsuba_mul(a0, b0, h, levels - 1);
  const u128 z = karatsuba_mul(a1, b1, hi_bits, levels - 1);
  const u128 y = karatsuba_mul(a0 + a1, b0 + b1, sum_bits, levels - 1);
  if (y < u + z) throw ContractViolation("karatsuba middle term negative");
  const u128 mid = y - u - z;
  if (bits + 2 < 128 && mid >= (u128{1} << (bits + 2))) throw ContractViolation("karatsuba middle term too wide");
  return u + (mid << h) + (z << (2 * h));
}

/// Pipelined Karatsuba word multiplier. 32-bit: one recursion level;
/// 64-bit: two levels, the inner products being 32-bit Karatsuba units.
template <unsigned W>
  requires(W == 32 || W == 64)
class KaratsubaUnit {
 public:
  static constexpr unsigned kLevels = W == 32 ? 1 : 2;

  struct Stage {
    std::string_view name;
    unsigned cycles;
  };

  /// Register stages from input to output.
  static std::vector<Stage> stages() {
    if constexpr (W == 32) {
      return {{"input register", 1}, {"pre-add", 1}, {"DSP multiply", 3}, {"combine", 1}};
    } else {
      return {{"input register", 1}, {"pre-add", 1},  {"32-bit Karatsuba", 6},
              {"subtract", 1},       {"combine", 1}, {"output register", 1}};
    }
  }

  static unsigned latency() {
    unsigned total = 0;
    for (const auto& s : stages()) total += s.cycles;
    return total;
  }

  /// Reported DSP usage: forced maps every adder onto DSP slices, auto is
  /// what the synthesizer chose (tool-attributed values, not derived).
  static unsigned dsp_count(DspMode mode) {
    if (mode == DspMode::Forced) return W == 32 ? 8 : 35;
    return W == 32 ? 4 : 12;
  }

  // An input on step k leaves on step k + L - 1 (see units.hpp), so the
  // stage registers form a delay of L - 1 further edges.
  KaratsubaUnit() : pipe_(latency() - 1) {}

  struct Output {
    bool valid = false;
    std::uint64_t lo = 0;
    std::uint64_t hi = 0;
  };

  Output step(bool valid, std::uint64_t a, std::uint64_t b) {
    Output in;
    if (valid) {
      if ((a & ~word_mask<W>()) != 0 || (b & ~word_mask<W>()) != 0) {
        throw std::invalid_argument("karatsuba operand exceeds the word size");
      }
      const u128 p = karatsuba_mul(a, b, W, kLevels);
      in = {true, static_cast<std::uint64_t>(p) & word_mask<W>(), static_cast<std::uint64_t>(p >> W)};
    }
    return pipe_.push(in);
  }

 private:
  DelayLine<Output> pipe_;
};

/// Karatsuba-based Row-Serial multiplier: the Row-Serial schedule on a
/// Karatsuba unit followed by a one-cycle fabric stage that adds the product,
/// t[i+j] and the running carry. Folding the carry into t[i+s] happens in
/// that fabric stage too, so it takes no multiplier slot, and the quotient
/// product is taken straight from the multiplier.
///
/// Per iteration, with K the multiplier latency, D = K + 1 and LUTRAM
/// t-storage (read latency R = 1):
///   2 .. S+1            LOOP_1 pairs
///   S+D                 LOOP_1 carry fold (fabric)
///   q                   quotient, q = max(S+2, D+4)
///   q+K                 m latched
///   q+K+2 .. q+K+S+1    LOOP_2 pairs
///   q+2K+S+1            LOOP_2 carry fold
///   q+2K+S+3            fold written back, iteration ends
/// A word computed in the fabric stage sits in the result register for one
/// cycle before it is written to t, which is where D = K + 1 comes from.
template <unsigned W>
  requires(W == 32 || W == 64)
class KaratsubaCiosDesign {
 public:
  static constexpr unsigned s = FieldElement<W>::kLimbs;
  static constexpr unsigned R = read_latency(TStorageKind::Lutram);

  explicit KaratsubaCiosDesign(DspMode mode = DspMode::Forced, const MontgomeryParams<W>& params = bls12_381<W>())
      : mode_(mode), params_(&params), t_(2 * s + 2, R) {}

  static unsigned word_op_latency() { return KaratsubaUnit<W>::latency() + 1; }
  static unsigned quotient_slot() { return std::max(1 + s + 1, 1 + 1 + word_op_latency() + 1 + R); }
  static unsigned loop1_fold_slot() { return s + word_op_latency(); }
  static unsigned loop2_start() { return quotient_slot() + KaratsubaUnit<W>::latency() + 1 + R; }
  static unsigned loop2_fold_slot() { return loop2_start() + s + KaratsubaUnit<W>::latency() - 1; }
  static unsigned iteration_cycles() { return loop2_fold_slot() + 2; }
  static std::uint64_t expected_cycles() { return 1 + static_cast<std::uint64_t>(s) * iteration_cycles() + 1; }

  /// Forced mode adds the DSPs of the three-input word adder (one 48-bit
  /// slice per 48 bits of word); auto mode is the tool-attributed total.
  static unsigned dsp_count(DspMode mode) {
    if (mode == DspMode::Forced) return KaratsubaUnit<W>::dsp_count(mode) + (W + 47) / 48;
    return W == 32 ? 4 : 12;
  }
  DspMode mode() const { return mode_; }

  DesignReport report(double frequency_hz) const {
    return {W == 32 ? "kara32" : "kara64", W, expected_cycles(), expected_cycles(), dsp_count(mode_), frequency_hz};
  }

  void set_trace(TraceSink sink) { trace_ = std::move(sink); }

  bool ap_ready() const { return phase_ == Phase::Idle; }
  bool ap_done() const { return done_; }
  FsmState state() const {
    switch (phase_) {
      case Phase::Idle: return FsmState::Idle;
      case Phase::Load: return FsmState::Load;
      case Phase::Unload: return FsmState::Unload;
      case Phase::Iterate: break;
    }
    if (r_ < quotient_slot()) return FsmState::Loop1;
    if (r_ < loop2_start()) return FsmState::Quotient;
    return FsmState::Loop2;
  }
  unsigned counter_i() const { return i_; }

  bool start(const FieldElement<W>& a, const FieldElement<W>& b) {
    if (phase_ != Phase::Idle) return false;
    require_operands_below_2p(a, b, *params_);
    a_ = a;
    b_ = b;
    phase_ = Phase::Load;
    return true;
  }

  std::optional<FieldElement<W>> tick() {
    ++cycle_;
    done_ = false;
    switch (phase_) {
      case Phase::Idle: return std::nullopt;
      case Phase::Load:
        t_.clear(cycle_);
        i_ = 0;
        r_ = 0;
        phase_ = Phase::Iterate;
        emit("load", 0, FsmState::Load);
        return std::nullopt;
      case Phase::Unload: {
        phase_ = Phase::Idle;
        done_ = true;
        emit("done", 0, FsmState::Done);
        FieldElement<W> r;
        for (unsigned j = 0; j < s; ++j) r[j] = t_.peek(s + j);
        return r;
      }
      case Phase::Iterate: break;
    }

    if (iterate()) {
      r_ = 0;
      if (++i_ == s) phase_ = Phase::Unload;
    }
    return std::nullopt;
  }

  RunResult<W> run_blocking(const FieldElement<W>& a, const FieldElement<W>& b) {
    if (!start(a, b)) throw ContractViolation("design busy");
    std::uint64_t cycles = 0;
    while (true) {
      ++cycles;
      if (auto r = tick()) return {*r, cycles};
    }
  }

 private:
  enum class Phase { Idle, Load, Iterate, Unload };

  struct InFlight {
    bool quotient = false;
    unsigned idx = 0;
    std::uint64_t t = 0;
    bool must_be_zero = false;
  };
  struct Write {
    unsigned idx = 0;
    std::uint64_t lo = 0;
    bool two_words = false;  // a carry fold also writes t[idx + 1]
    std::uint64_t hi = 0;
    bool must_be_zero = false;
  };

  // One cycle of outer iteration i_. Returns true on its final cycle.
  bool iterate() {
    ++r_;
    const unsigned base = i_;
    if (pending_) {
      if (pending_->must_be_zero && pending_->lo != 0) throw ContractViolation("reduction row left t[i] non-zero");
      t_.write(pending_->idx, pending_->lo, cycle_);
      if (pending_->two_words) t_.write(pending_->idx + 1, pending_->hi, cycle_);
      pending_.reset();
    }
    pending_ = staged_;
    staged_.reset();
    if (m_pending_) {
      m_ = m_value_;
      m_ready_ = cycle_ + 1;
      m_pending_ = false;
      emit("m_latched", 0);
    }

    bool issue = false;
    std::uint64_t a = 0, b = 0;
    InFlight tag;
    if (r_ >= 2 && r_ <= s + 1) {
      const unsigned j = r_ - 2;
      issue = true;
      a = a_[j];
      b = b_[i_];
      tag = {false, base + j, t_.read(base + j, cycle_), false};
      emit("pair", j);
    } else if (r_ == quotient_slot()) {
      issue = true;
      a = t_.read(base, cycle_);
      b = params_->p_prime;
      tag.quotient = true;
      emit("quotient", 0);
    } else if (r_ >= loop2_start() && r_ < loop2_start() + s) {
      const unsigned j = r_ - loop2_start();
      if (m_ready_ > cycle_) throw ContractViolation("quotient used before it was latched");
      issue = true;
      a = params_->p_limbs[j];
      b = m_;
      tag = {false, base + j, t_.read(base + j, cycle_), j == 0};
      emit("pair", j);
    }
    if (issue) inflight_.push_back(tag);

    // Fabric stage: consumes the product retiring from the multiplier or,
    // on a fold slot, the carry.
    const auto prod = mult_.step(issue, a, b);
    const bool fold = r_ == loop1_fold_slot() || r_ == loop2_fold_slot();
    if (prod.valid) {
      const InFlight f = inflight_.front();
      inflight_.pop_front();
      if (f.quotient) {
        m_value_ = prod.lo;
        m_pending_ = true;
      } else {
        if (fold) throw ContractViolation("fold slot collides with a retiring product");
        const u128 sum = (static_cast<u128>(prod.hi) << W) + prod.lo + f.t + carry_;
        carry_ = static_cast<std::uint64_t>(sum >> W);
        staged_ = Write{f.idx, static_cast<std::uint64_t>(sum) & word_mask<W>(), false, 0, f.must_be_zero};
      }
    }
    if (fold) {
      const u128 sum = static_cast<u128>(t_.read(base + s, cycle_)) + carry_;
      carry_ = 0;
      staged_ = Write{base + s, static_cast<std::uint64_t>(sum) & word_mask<W>(), true,
                       static_cast<std::uint64_t>(sum >> W), false};
      emit("carry_fold", s);
    }

    if (r_ == iteration_cycles()) {
      if (pending_ || staged_ || !inflight_.empty()) throw ContractViolation("iteration ended with words in flight");
      return true;
    }
    return false;
  }

  void emit(std::string_view event, unsigned j) { emit(event, j, state()); }
  void emit(std::string_view event, unsigned j, FsmState state) {
    if (trace_) trace_(TraceEvent{cycle_, state, i_, j, event});
  }

  DspMode mode_;
  const MontgomeryParams<W>* params_;
  TStorage t_;
  KaratsubaUnit<W> mult_;
  std::deque<InFlight> inflight_;
  std::optional<Write> staged_;   // fabric result register
  std::optional<Write> pending_;  // t write on this cycle
  Phase phase_ = Phase::Idle;
  FieldElement<W> a_;
  FieldElement<W> b_;
  unsigned i_ = 0;
  unsigned r_ = 0;
  std::uint64_t carry_ = 0;
  std::uint64_t m_ = 0;
  std::uint64_t m_value_ = 0;
  std::uint64_t m_ready_ = 0;
  bool m_pending_ = false;
  std::uint64_t cycle_ = 0;
  bool done_ = false;
  TraceSink trace_;
};

}  // namespace montdsp
