#pragma once

#include <algorithm>
#include <array>
#include <cstdint>
#include <optional>

#include "montdsp/design_common.hpp"
#include "montdsp/trace.hpp"
#include "montdsp/units.hpp"

namespace montdsp {

/// Row-Parallel Montgomery multiplier: one MADD384 unit shared by both inner
/// loops and a dedicated MUL unit for the quotient. Per outer iteration:
///
///   1            LOOP_1: MADD384(a, b[i], t[i..i+s])
///   Lm           Lo_0 (the new t[i]) leaves the MADD stage
///   Lm+1         MUL(t[i], p') starts on the forwarded word
///   L384+1       LOOP_1 window written back
///   L384+2       QUOTIENT: wait for m
///   x            LOOP_2: MADD384(p, m, t[i..i+s]) once the window is back
///                (x >= L384+3) and m is latched (x >= Lm+Lmul+2)
///   x+L384       LOOP_2 window written back
///   x+L384+1     counter update
///   x+L384+2     return to LOOP_1
template <unsigned W>
  requires SupportedWord<W>
class RowParallelDesign {
 public:
  static constexpr unsigned s = FieldElement<W>::kLimbs;

  explicit RowParallelDesign(const MontgomeryParams<W>& params = bls12_381<W>()) : params_(&params) {}

  static unsigned loop2_issue_slot() {
    return std::max(Madd384Unit<W>::latency() + 3, MaddUnit<W>::latency() + MulUnit<W>::latency() + 2);
  }
  static unsigned iteration_cycles() { return loop2_issue_slot() + Madd384Unit<W>::latency() + 2; }
  static std::uint64_t expected_cycles() { return 1 + static_cast<std::uint64_t>(s) * iteration_cycles(); }

  /// Structural count: MADD384 plus the quotient MUL.
  static unsigned dsp_count() { return Madd384Unit<W>::dsp_count() + MulUnit<W>::dsp_count(); }

  DesignReport report(double frequency_hz) const {
    return {"rp", W, expected_cycles(), expected_cycles(), dsp_count(), frequency_hz};
  }

  void set_trace(TraceSink sink) { trace_ = std::move(sink); }

  bool ap_ready() const { return phase_ == Phase::Idle; }
  bool ap_done() const { return done_; }
  FsmState state() const { return state_; }
  unsigned counter_i() const { return i_; }

  bool start(const FieldElement<W>& a, const FieldElement<W>& b) {
    if (phase_ != Phase::Idle) return false;
    require_operands_below_2p(a, b, *params_);
    a_ = a;
    b_ = b;
    phase_ = Phase::Load;
    state_ = FsmState::Load;
    return true;
  }

  std::optional<FieldElement<W>> tick() {
    ++cycle_;
    done_ = false;
    if (phase_ == Phase::Idle) {
      step_units({}, {});
      return std::nullopt;
    }
    if (phase_ == Phase::Load) {
      t_.fill(0);
      i_ = 0;
      begin_iteration();
      phase_ = Phase::Iterate;
      emit("load", FsmState::Load);
      step_units({}, {});
      return std::nullopt;
    }

    ++r_;
    // Commit results that left the units on the previous cycle.
    if (window_pending_) {
      std::copy(window_.begin(), window_.end(), t_.begin() + i_);
      window_pending_ = false;
      if (in_loop2_) {
        if (t_[i_] != 0) throw ContractViolation("reduction row left t[i] non-zero");
        loop2_written_ = r_;
      } else {
        loop1_written_ = r_;
        state_ = FsmState::Quotient;
      }
    }
    if (m_pending_) {
      m_ = m_value_;
      m_pending_ = false;
      m_latched_ = r_;
      emit("m_latched");
    }

    typename Madd384Unit<W>::Input madd_in;
    WordOperands mul_in;
    if (r_ == 1) {
      state_ = FsmState::Loop1;
      madd_in = window_input(a_, b_[i_]);
      emit("loop1_issue");
    } else if (forward_pending_) {
      mul_in = {true, forwarded_, params_->p_prime, 0};
      forward_pending_ = false;
      emit("quotient_issue");
    }
    if (!in_loop2_ && loop1_written_ && r_ >= loop1_written_ + 2 && m_latched_ && r_ > m_latched_) {
      in_loop2_ = true;
      state_ = FsmState::Loop2;
      madd_in = window_input(params_->p_limbs, m_);
      emit("loop2_issue");
    }

    step_units(madd_in, mul_in);

    if (in_loop2_ && loop2_written_ && r_ == loop2_written_ + 2) {
      if (++i_ == s) {
        phase_ = Phase::Idle;
        state_ = FsmState::Idle;
        done_ = true;
        emit("done", FsmState::Done);
        FieldElement<W> result;
        for (unsigned j = 0; j < s; ++j) result[j] = t_[s + j];
        return result;
      }
      begin_iteration();
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
  enum class Phase { Idle, Load, Iterate };

  void begin_iteration() {
    r_ = 0;
    in_loop2_ = false;
    loop1_written_ = 0;
    loop2_written_ = 0;
    m_latched_ = 0;
  }

  typename Madd384Unit<W>::Input window_input(const FieldElement<W>& a, std::uint64_t b) const {
    typename Madd384Unit<W>::Input in;
    in.valid = true;
    in.a = a;
    in.b = b;
    std::copy(t_.begin() + i_, t_.begin() + i_ + s + 1, in.window.begin());
    return in;
  }

  void step_units(const typename Madd384Unit<W>::Input& madd_in, const WordOperands& mul_in) {
    const auto out = madd384_.step(madd_in);
    if (madd_in.valid && out.rejected) throw ContractViolation("MADD384 issued while busy");
    if (out.lo0_valid && !in_loop2_) {
      forwarded_ = out.lo0;
      forward_pending_ = true;
    }
    if (out.valid) {
      if (out.overflow) throw ContractViolation("MADD384 window overflow");
      window_ = out.window;
      window_pending_ = true;
    }
    const auto m = mul_.step(mul_in);
    if (m.valid) {
      m_value_ = m.lo;
      m_pending_ = true;
    }
  }

  void emit(std::string_view event) { emit(event, state_); }
  void emit(std::string_view event, FsmState state) {
    if (trace_) trace_(TraceEvent{cycle_, state, i_, 0, event});
  }

  const MontgomeryParams<W>* params_;
  Madd384Unit<W> madd384_;
  MulUnit<W> mul_;
  std::array<std::uint64_t, 2 * s + 1> t_{};
  std::array<std::uint64_t, s + 1> window_{};
  Phase phase_ = Phase::Idle;
  FsmState state_ = FsmState::Idle;
  FieldElement<W> a_;
  FieldElement<W> b_;
  unsigned i_ = 0;
  unsigned r_ = 0;
  bool in_loop2_ = false;
  bool window_pending_ = false;
  bool forward_pending_ = false;
  bool m_pending_ = false;
  std::uint64_t forwarded_ = 0;
  std::uint64_t m_value_ = 0;
  std::uint64_t m_ = 0;
  unsigned loop1_written_ = 0;
  unsigned loop2_written_ = 0;
  unsigned m_latched_ = 0;
  std::uint64_t cycle_ = 0;
  bool done_ = false;
  TraceSink trace_;
};

}  // namespace montdsp
