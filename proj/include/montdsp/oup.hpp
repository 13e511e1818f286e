#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "montdsp/row_serial.hpp"

namespace montdsp {

/// Outer Unrolled Pipeline: s stages, stage i runs outer iteration i on its
/// own MADDCARRY unit and LUTRAM t-storage. A stage is blocking: it loads a
/// job (one cycle, parallel 384-bit load), runs both inner loops, then hands
/// a, b and the shifted window to the next stage (one cycle). The last
/// stage's handoff is the pipeline output.
///
/// A single stall flag freezes every stage at once, so a stalled pipeline
/// neither accepts, advances nor emits.
template <unsigned W>
  requires SupportedWord<W>
class OuterUnrolledPipeline {
 public:
  static constexpr unsigned s = FieldElement<W>::kLimbs;

  explicit OuterUnrolledPipeline(const MontgomeryParams<W>& params = bls12_381<W>()) : params_(&params) {
    for (unsigned k = 0; k < s; ++k) stages_.push_back(std::make_unique<Stage>(params, k));
  }

  static std::uint64_t interval() {
    return 1 + RowSerialSchedule::make(s, MaddCarryUnit<W>::latency(), read_latency(TStorageKind::Lutram)).iter + 1;
  }
  static std::uint64_t first_result_latency() { return s * interval(); }
  static unsigned stage_count() { return s; }
  static unsigned dsp_count() { return s * MaddCarryUnit<W>::dsp_count(); }

  DesignReport report(double frequency_hz) const {
    return {"oup", W, first_result_latency(), interval(), dsp_count(), frequency_hz};
  }

  void set_stall(bool stall) { stall_ = stall; }
  bool stalled() const { return stall_; }

  /// True when stage 0 can take a job on the next tick.
  bool can_accept() const { return !stall_ && stages_[0]->phase == Phase::Idle; }

  /// Offers operands for the next tick; refused while stage 0 is busy or
  /// the pipeline is stalled.
  bool feed(const FieldElement<W>& a, const FieldElement<W>& b) {
    if (!can_accept()) return false;
    require_operands_below_2p(a, b, *params_);
    Job job;
    job.a = a;
    job.b = b;
    stages_[0]->receive(std::move(job));
    ++in_flight_;
    return true;
  }

  std::size_t in_flight() const { return in_flight_; }

  /// One clock cycle; returns a finished product on its output cycle.
  std::optional<FieldElement<W>> tick() {
    ++cycle_;
    if (stall_) return std::nullopt;
    std::optional<FieldElement<W>> out;
    // Downstream first, so a stage finishing its handoff frees its input
    // register for the upstream handoff on the same edge.
    for (int k = static_cast<int>(s) - 1; k >= 0; --k) {
      Stage& st = *stages_[k];
      auto handed = st.tick(cycle_, k + 1 < static_cast<int>(s) ? stages_[k + 1].get() : nullptr);
      if (handed) {
        out = std::move(handed);
        --in_flight_;
      }
    }
    return out;
  }

  std::uint64_t cycle() const { return cycle_; }

 private:
  enum class Phase { Idle, Load, Iterate, Handoff };

  struct Job {
    FieldElement<W> a;
    FieldElement<W> b;
    std::array<std::uint64_t, s + 2> window{};
  };

  struct Stage {
    Stage(const MontgomeryParams<W>& params, unsigned index)
        : index(index), engine(params, TStorageKind::Lutram, s + 2) {}

    void receive(Job j) {
      job = std::move(j);
      phase = Phase::Load;
    }

    // Returns the result when the last stage hands its job off.
    std::optional<FieldElement<W>> tick(std::uint64_t now, Stage* next) {
      switch (phase) {
        case Phase::Idle: return std::nullopt;
        case Phase::Load:
          for (unsigned w = 0; w < s + 2; ++w) engine.t().write(w, job.window[w], now);
          engine.begin(job.a, job.b[index], 0, index);
          phase = Phase::Iterate;
          return std::nullopt;
        case Phase::Iterate:
          if (engine.tick(now)) phase = Phase::Handoff;
          return std::nullopt;
        case Phase::Handoff: {
          Job out;
          out.a = job.a;
          out.b = job.b;
          for (unsigned w = 0; w + 1 < s + 2; ++w) out.window[w] = engine.t().peek(w + 1);
          if (next == nullptr) {
            phase = Phase::Idle;
            FieldElement<W> r;
            for (unsigned j = 0; j < s; ++j) r[j] = out.window[j];
            return r;
          }
          if (next->phase != Phase::Idle) return std::nullopt;  // wait for the next stage
          next->receive(std::move(out));
          phase = Phase::Idle;
          return std::nullopt;
        }
      }
      return std::nullopt;
    }

    unsigned index;
    RowSerialEngine<W> engine;
    Phase phase = Phase::Idle;
    Job job;
  };

  const MontgomeryParams<W>* params_;
  std::vector<std::unique_ptr<Stage>> stages_;
  bool stall_ = false;
  std::size_t in_flight_ = 0;
  std::uint64_t cycle_ = 0;
};

}  // namespace montdsp
