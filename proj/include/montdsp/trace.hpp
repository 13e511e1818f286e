#pragma once

#include <cstdint>
#include <functional>
#include <ostream>
#include <string>
#include <string_view>

namespace montdsp {

enum class FsmState { Idle, Load, Loop1, Quotient, Loop2, Unload, Done };

inline std::string_view to_string(FsmState s) {
  switch (s) {
    case FsmState::Idle: return "IDLE";
    case FsmState::Load: return "LOAD";
    case FsmState::Loop1: return "LOOP_1";
    case FsmState::Quotient: return "QUOTIENT";
    case FsmState::Loop2: return "LOOP_2";
    case FsmState::Unload: return "UNLOAD";
    case FsmState::Done: return "DONE";
  }
  return "?";
}

struct TraceEvent {
  std::uint64_t cycle = 0;
  FsmState state = FsmState::Idle;
  unsigned counter_i = 0;
  unsigned counter_j = 0;
  std::string_view event;
};

/// Receives one event per notable FSM action; empty when tracing is off.
using TraceSink = std::function<void(const TraceEvent&)>;

/// Line format: cycle,state,counter_i,counter_j,event
inline std::string format_trace(const TraceEvent& e) {
  return std::to_string(e.cycle) + "," + std::string(to_string(e.state)) + "," + std::to_string(e.counter_i) + "," +
         std::to_string(e.counter_j) + "," + std::string(e.event);
}

inline TraceSink trace_to(std::ostream& os) {
  return [&os](const TraceEvent& e) { os << format_trace(e) << '\n'; };
}

}  // namespace montdsp
