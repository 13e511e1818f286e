#pragma once

#include <algorithm>
#include <cstdint>
#include <deque>
#include <optional>

#include "montdsp/design_common.hpp"
#include "montdsp/trace.hpp"
#include "montdsp/tstorage.hpp"
#include "montdsp/units.hpp"

namespace montdsp {

/// Slot plan of one outer iteration on a single MADDCARRY unit, in cycles
/// relative to the first cycle of the iteration (1-based).
///
///   1 .. E1             read t[i] ahead of the first pair
///   E1+1 .. E1+S        LOOP_1 pairs (a[j], b[i], t[i+j])
///   E1+S+1              (0, 0, t[i+s]): folds the carry into t[i+s]
///   E1+S+2              zero push clearing the carry, only when the quotient
///                       slot is later (long unit latency)
///   q                   (t[i], p', 0): quotient m
///   q+1                 zero push dropping the high half of t[i] p'
///   q+D                 m latched
///   q+D+E2+1 ..         LOOP_2 pairs (p[j], m, t[i+j]), carry fold, zero push
///   iter                the last LOOP_2 word is written back
///
/// The quotient waits until t[i] from the first pair has been written back
/// and read again: q = max(E1+S+2, E1+1+D+1+R).
struct RowSerialSchedule {
  unsigned s = 0;   // words per operand (S)
  unsigned D = 0;   // MADDCARRY latency
  unsigned R = 0;   // t-storage read latency
  unsigned E1 = 0;  // LOOP_1 entry
  unsigned E2 = 0;  // LOOP_2 entry
  unsigned q = 0;
  bool pre_clear = false;
  unsigned loop2_start = 0;
  unsigned iter = 0;

  static constexpr RowSerialSchedule make(unsigned s, unsigned d, unsigned r) {
    RowSerialSchedule k;
    k.s = s;
    k.D = d;
    k.R = r;
    k.E1 = r;
    k.E2 = r;
    k.q = std::max(k.E1 + s + 2, k.E1 + 1 + d + 1 + r);
    k.pre_clear = k.q > k.E1 + s + 2;
    k.loop2_start = k.q + d + k.E2 + 1;
    k.iter = k.loop2_start + s + 1 + d;
    return k;
  }
};

/// Runs outer iterations of the CIOS loop on one MADDCARRY unit against a
/// word-addressed t-storage. The window for iteration i starts at `base`.
template <unsigned W>
  requires SupportedWord<W>
class RowSerialEngine {
 public:
  static constexpr unsigned s = FieldElement<W>::kLimbs;

  RowSerialEngine(const MontgomeryParams<W>& params, TStorageKind kind, std::size_t t_words)
      : params_(&params),
        t_(t_words, read_latency(kind)),
        sched_(RowSerialSchedule::make(s, MaddCarryUnit<W>::latency(), read_latency(kind))) {}

  const RowSerialSchedule& schedule() const { return sched_; }
  TStorage& t() { return t_; }
  const TStorage& t() const { return t_; }
  unsigned dsp_count() const { return MaddCarryUnit<W>::dsp_count(); }

  void set_trace(const TraceSink* sink) { trace_ = sink; }

  /// Prepares iteration `i` (the trace counter) with the window at `base`.
  void begin(const FieldElement<W>& a, std::uint64_t b_i, unsigned base, unsigned i) {
    a_ = &a;
    b_i_ = b_i;
    base_ = base;
    i_ = i;
    r_ = 0;
    j_ = 0;
  }

  FsmState state() const {
    if (r_ < sched_.q) return FsmState::Loop1;
    if (r_ < sched_.loop2_start) return FsmState::Quotient;
    return FsmState::Loop2;
  }
  unsigned counter_j() const { return j_; }
  std::uint64_t last_quotient() const { return m_; }

  /// Advances one clock cycle at absolute time `now`. Returns true on the
  /// final cycle of the iteration.
  bool tick(std::uint64_t now) {
    ++r_;
    if (pending_) {
      commit(*pending_, now);
      pending_.reset();
    }

    const auto& k = sched_;
    WordOperands in;
    if (r_ > k.E1 && r_ <= k.E1 + s) {
      j_ = r_ - k.E1 - 1;
      issue(in, (*a_)[j_], b_i_, t_.read(base_ + j_, now), Dest::t(base_ + j_), now, "pair");
    } else if (r_ == k.E1 + s + 1) {
      issue(in, 0, 0, t_.read(base_ + s, now), Dest::t(base_ + s), now, "carry_add");
    } else if (k.pre_clear && r_ == k.E1 + s + 2) {
      issue(in, 0, 0, 0, Dest::t(base_ + s + 1), now, "pre_clear");
    } else if (r_ == k.q) {
      issue(in, t_.read(base_, now), params_->p_prime, 0, Dest::quotient(), now, "quotient");
    } else if (r_ == k.q + 1) {
      issue(in, 0, 0, 0, Dest::discard(), now, "carry_reset");
    } else if (r_ >= k.loop2_start && r_ < k.loop2_start + s) {
      if (m_ready_ > now) throw ContractViolation("quotient used before it was latched");
      j_ = r_ - k.loop2_start;
      issue(in, params_->p_limbs[j_], m_, t_.read(base_ + j_, now), Dest::t(base_ + j_, j_ == 0), now, "pair");
    } else if (r_ == k.loop2_start + s) {
      issue(in, 0, 0, t_.read(base_ + s, now), Dest::t(base_ + s), now, "carry_add");
    } else if (r_ == k.loop2_start + s + 1) {
      issue(in, 0, 0, 0, Dest::t(base_ + s + 1), now, "flush");
    }

    const auto out = unit_.step(in);
    if (out.valid) {
      if (inflight_.empty()) throw ContractViolation("MADDCARRY produced an unexpected word");
      pending_ = Write{inflight_.front(), out.p};
      inflight_.pop_front();
    }

    if (r_ == k.iter) {
      if (pending_ || !inflight_.empty()) throw ContractViolation("iteration ended with words in flight");
      return true;
    }
    return false;
  }

 private:
  struct Dest {
    enum Kind { Storage, Quotient, Discard } kind = Discard;
    unsigned idx = 0;
    bool must_be_zero = false;  // t[i] after the reduction row
    static Dest t(unsigned idx, bool zero = false) { return {Storage, idx, zero}; }
    static Dest quotient() { return {Quotient, 0, false}; }
    static Dest discard() { return {Discard, 0, false}; }
  };
  struct Write {
    Dest dest;
    std::uint64_t value = 0;
  };

  void issue(WordOperands& in, std::uint64_t a, std::uint64_t b, std::uint64_t c, Dest dest, std::uint64_t now,
             std::string_view event) {
    in = {true, a, b, c};
    inflight_.push_back(dest);
    if (trace_ && *trace_) (*trace_)(TraceEvent{now, state(), i_, j_, event});
  }

  void commit(const Write& w, std::uint64_t now) {
    switch (w.dest.kind) {
      case Dest::Storage:
        if (w.dest.must_be_zero && w.value != 0) throw ContractViolation("reduction row left t[i] non-zero");
        t_.write(w.dest.idx, w.value, now);
        break;
      case Dest::Quotient:
        m_ = w.value;
        m_ready_ = now + 1;
        if (trace_ && *trace_) (*trace_)(TraceEvent{now, state(), i_, j_, "m_latched"});
        break;
      case Dest::Discard: break;
    }
  }

  const MontgomeryParams<W>* params_;
  TStorage t_;
  RowSerialSchedule sched_;
  MaddCarryUnit<W> unit_;
  std::deque<Dest> inflight_;
  std::optional<Write> pending_;
  const FieldElement<W>* a_ = nullptr;
  std::uint64_t b_i_ = 0;
  unsigned base_ = 0;
  unsigned i_ = 0;
  unsigned r_ = 0;
  unsigned j_ = 0;
  std::uint64_t m_ = 0;
  std::uint64_t m_ready_ = 0;
  const TraceSink* trace_ = nullptr;
};

/// Row-Serial Montgomery multiplier: one MADDCARRY unit, t in LUTRAM
/// (parallel load/unload) or BRAM (word-serial unload through the >>X
/// select). Blocking: one multiplication at a time.
template <unsigned W>
  requires SupportedWord<W>
class RowSerialDesign {
 public:
  static constexpr unsigned s = FieldElement<W>::kLimbs;

  explicit RowSerialDesign(TStorageKind kind = TStorageKind::Lutram,
                           const MontgomeryParams<W>& params = bls12_381<W>())
      : kind_(kind), params_(&params), engine_(params, kind, 2 * s + 2) {}

  static std::uint64_t unload_cycles(TStorageKind kind) { return kind == TStorageKind::Lutram ? 1 : s + read_latency(kind); }

  /// Cycle count implied by the schedule: load, s iterations, unload.
  static std::uint64_t expected_cycles(TStorageKind kind) {
    const auto k = RowSerialSchedule::make(s, MaddCarryUnit<W>::latency(), read_latency(kind));
    return 1 + static_cast<std::uint64_t>(s) * k.iter + unload_cycles(kind);
  }

  static unsigned dsp_count() { return MaddCarryUnit<W>::dsp_count(); }

  DesignReport report(double frequency_hz) const {
    const auto cycles = expected_cycles(kind_);
    return {kind_ == TStorageKind::Lutram ? "rs" : "rs-bram", W, cycles, cycles, dsp_count(), frequency_hz};
  }

  const RowSerialSchedule& schedule() const { return engine_.schedule(); }

  void set_trace(TraceSink sink) {
    trace_ = std::move(sink);
    engine_.set_trace(&trace_);
  }

  bool ap_ready() const { return phase_ == Phase::Idle; }
  bool ap_done() const { return done_; }
  FsmState state() const {
    switch (phase_) {
      case Phase::Idle: return FsmState::Idle;
      case Phase::Load: return FsmState::Load;
      case Phase::Iterate: return engine_.state();
      case Phase::Unload: return FsmState::Unload;
    }
    return FsmState::Idle;
  }
  unsigned counter_i() const { return i_; }
  unsigned counter_j() const { return engine_.counter_j(); }
  std::uint64_t cycle() const { return cycle_; }

  /// ap_start: latches operands when idle; ignored (returns false) when busy.
  bool start(const FieldElement<W>& a, const FieldElement<W>& b) {
    if (phase_ != Phase::Idle) return false;
    require_operands_below_2p(a, b, *params_);
    a_ = a;
    b_ = b;
    phase_ = Phase::Load;
    return true;
  }

  /// One clock cycle. Returns the result on the cycle ap_done is raised.
  std::optional<FieldElement<W>> tick() {
    ++cycle_;
    done_ = false;
    switch (phase_) {
      case Phase::Idle: return std::nullopt;
      case Phase::Load:
        engine_.t().clear(cycle_);
        i_ = 0;
        engine_.begin(a_, b_[0], 0, 0);
        phase_ = Phase::Iterate;
        emit("load", FsmState::Load);
        return std::nullopt;
      case Phase::Iterate:
        if (engine_.tick(cycle_)) {
          if (++i_ == s) {
            phase_ = Phase::Unload;
            unload_left_ = unload_cycles(kind_);
          } else {
            engine_.begin(a_, b_[i_], i_, i_);
          }
        }
        return std::nullopt;
      case Phase::Unload:
        if (--unload_left_ > 0) return std::nullopt;
        phase_ = Phase::Idle;
        done_ = true;
        emit("done", FsmState::Done);
        return read_result();
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

  FieldElement<W> read_result() const {
    FieldElement<W> r;
    for (unsigned j = 0; j < s; ++j) r[j] = engine_.t().peek(s + j);
    return r;
  }

  // Load and done are reported in their own state; the FSM has already
  // moved on by the time the event is emitted.
  void emit(std::string_view event, FsmState state) {
    if (trace_) trace_(TraceEvent{cycle_, state, i_, 0, event});
  }

  TStorageKind kind_;
  const MontgomeryParams<W>* params_;
  RowSerialEngine<W> engine_;
  Phase phase_ = Phase::Idle;
  FieldElement<W> a_;
  FieldElement<W> b_;
  unsigned i_ = 0;
  std::uint64_t unload_left_ = 0;
  std::uint64_t cycle_ = 0;
  bool done_ = false;
  TraceSink trace_;
};

}  // namespace montdsp
